#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "catsim/sweep.hpp"

namespace {

struct GlobalOpts {
    std::string config;
    catsim::RunOptions run;
};

int execute(const std::string& expected, const GlobalOpts& g) {
    try {
        nlohmann::json cfg = catsim::load_config(g.config);
        if (!cfg.contains("experiment")) cfg["experiment"] = expected;
        if (cfg["experiment"].get<std::string>() != expected) {
            std::fprintf(stderr, "error: config experiment '%s' does not match subcommand '%s'\n",
                         cfg["experiment"].get<std::string>().c_str(), expected.c_str());
            return 2;
        }
        const catsim::ValidationReport rep = catsim::validate_config(cfg);
        for (const auto& f : rep.findings) {
            std::fprintf(stderr, "%s: [%s] %s\n", f.fatal ? "error" : "warning", f.path.c_str(),
                         f.message.c_str());
        }
        if (!rep.ok()) return 2;
        const int n = catsim::run_experiment(cfg, g.run);
        std::printf("%s: %d point(s) computed, outputs in %s\n", expected.c_str(), n,
                    g.run.out_dir.c_str());
        return 0;
    } catch (const catsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 3;
    }
}

int run_validate(const GlobalOpts& g) {
    try {
        const catsim::ValidationReport rep = catsim::validate_config_file(g.config);
        for (const auto& f : rep.findings) {
            std::printf("%s: [%s] %s\n", f.fatal ? "error" : "warning", f.path.c_str(),
                        f.message.c_str());
        }
        if (!rep.ok()) return 2;
        std::printf("config ok\n");
        return 0;
    } catch (const catsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cat-qubit confinement sweeps"};
    app.require_subcommand(1);

    GlobalOpts g;
    g.run.out_dir = "out";

    const std::vector<std::string> experiments = {"spectrum",     "idle-bitflip", "gamma-map",
                                                  "zgate",        "cnot",         "buffer-noise",
                                                  "circuit-params"};
    std::string selected;
    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", g.config, "JSON config file")->required();
        sub->add_option("--out", g.run.out_dir, "output directory");
        sub->add_option("--workers", g.run.workers, "worker threads (0 = auto)");
        sub->add_flag("--force", g.run.force, "recompute points already in the ledger");
        sub->add_option("--seed", g.run.seed, "base RNG seed");
        sub->callback([&selected, name]() { selected = name; });
    }
    CLI::App* val = app.add_subcommand("validate", "validate a config without running it");
    val->add_option("--config", g.config, "JSON config file")->required();
    val->callback([&selected]() { selected = "validate"; });

    CLI11_PARSE(app, argc, argv);

    if (selected == "validate") return run_validate(g);
    return execute(selected, g);
}
