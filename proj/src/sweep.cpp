#include "catsim/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "catsim/circuit.hpp"
#include "catsim/estimators.hpp"
#include "catsim/gates.hpp"
#include "catsim/lindblad.hpp"
#include "catsim/spectra.hpp"

namespace catsim {

using nlohmann::json;
namespace fs = std::filesystem;

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return cfg;
}

std::uint64_t config_hash(const nlohmann::json& cfg) {
    const std::string dump = cfg.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ledger_dir(const std::string& out_dir) {
    if (const char* env = std::getenv("CATCONFINE_CACHE_DIR"); env && *env) return env;
    return out_dir;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

const std::vector<std::string> kExperiments = {
    "spectrum", "idle-bitflip", "gamma-map", "zgate", "cnot", "buffer-noise", "circuit-params"};

void check_rate(const json& cfg, const std::string& obj, const std::string& field,
                ValidationReport& rep) {
    if (!cfg.contains(obj) || !cfg[obj].contains(field)) return;
    if (!cfg[obj][field].is_number() || cfg[obj][field].get<double>() < 0) {
        rep.findings.push_back({obj + "." + field, "must be a nonnegative number", true});
    }
}

std::vector<double> grid_values(const json& cfg, const std::string& field) {
    std::vector<double> out;
    if (cfg.contains(field)) {
        if (cfg[field].is_array()) {
            for (const auto& v : cfg[field]) out.push_back(v.get<double>());
        } else {
            out.push_back(cfg[field].get<double>());
        }
    }
    return out;
}

}  // namespace

ValidationReport validate_config(const nlohmann::json& cfg) {
    ValidationReport rep;
    if (!cfg.contains("experiment") || !cfg["experiment"].is_string()) {
        rep.findings.push_back({"experiment", "missing experiment name", true});
        return rep;
    }
    const std::string exp = cfg["experiment"].get<std::string>();
    if (std::find(kExperiments.begin(), kExperiments.end(), exp) == kExperiments.end()) {
        rep.findings.push_back({"experiment", "unknown experiment: " + exp, true});
        return rep;
    }
    if (cfg.contains("schema_version") && cfg["schema_version"].get<int>() != 1) {
        rep.findings.push_back({"schema_version", "unsupported schema version", true});
    }

    for (const std::string f : {"kappa1", "n_th", "kappa_phi"}) check_rate(cfg, "noise", f, rep);
    for (const std::string f : {"kappa2", "kerr", "g2"}) check_rate(cfg, "confinement", f, rep);

    if (exp == "circuit-params") {
        if (!cfg.contains("params") || !cfg["params"].is_object()) {
            rep.findings.push_back({"params", "circuit-params requires a params object", true});
        }
        return rep;
    }

    const auto alpha2 = grid_values(cfg, "alpha2");
    if (alpha2.empty()) {
        rep.findings.push_back({"alpha2", "empty parameter grid", true});
    }
    for (double a2 : alpha2) {
        if (a2 <= 0) rep.findings.push_back({"alpha2", "mean photon number must be positive", true});
    }

    if (cfg.contains("truncation_override")) {
        const int dim = cfg["truncation_override"].get<int>();
        if (dim > 0) {
            for (double a2 : alpha2) {
                const Complex alpha(std::sqrt(a2), 0.0);
                const double tail = std::max(coherent_tail_mass(dim, alpha),
                                             coherent_tail_mass(dim, -alpha));
                if (tail > 1e-10) {
                    rep.findings.push_back(
                        {"truncation_override",
                         "dim " + std::to_string(dim) + " too small at alpha2 " +
                             std::to_string(a2) + "; rule suggests " +
                             std::to_string(default_dim(alpha)),
                         false});
                }
            }
        }
    }

    if (exp == "zgate" || exp == "cnot" || exp == "buffer-noise") {
        if (grid_values(cfg, "T").empty()) {
            rep.findings.push_back({"T", "gate experiments need at least one gate time", true});
        }
    }
    if (exp == "gamma-map" && grid_values(cfg, "ratio").empty()) {
        rep.findings.push_back({"ratio", "gamma-map needs a ratio grid", true});
    }
    if (cfg.contains("tolerances")) {
        for (const std::string f : {"rtol", "atol"}) {
            if (cfg["tolerances"].contains(f) && cfg["tolerances"][f].get<double>() <= 0) {
                rep.findings.push_back({"tolerances." + f, "must be positive", true});
            }
        }
    }
    return rep;
}

ValidationReport validate_config_file(const std::string& path) {
    return validate_config(load_config(path));
}

// ---------------------------------------------------------------------------
// Execution plumbing

namespace {

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Task {
    std::string id;
    std::function<json()> run;
};

// Runs tasks with resume-by-ledger; returns one row per task in task order.
std::vector<json> run_tasks(const json& cfg, const RunOptions& opts, const std::string& exp,
                            const std::vector<Task>& tasks, int& computed) {
    const std::uint64_t hash = config_hash(cfg);
    const std::string hashstr = hex_hash(hash);
    fs::create_directories(opts.out_dir);
    const std::string ldir = ledger_dir(opts.out_dir);
    fs::create_directories(ldir);
    const std::string lpath = ldir + "/catconfine-ledger.jsonl";

    std::map<std::string, json> done;
    if (!opts.force && fs::exists(lpath)) {
        std::ifstream in(lpath);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json entry = json::parse(line, nullptr, false);
            if (entry.is_discarded()) continue;
            if (entry.value("hash", "") == hashstr && entry.value("status", "") == "done") {
                done[entry.value("point", "")] = entry["row"];
            }
        }
    }

    std::vector<json> rows(tasks.size());
    std::vector<int> pending;
    for (size_t i = 0; i < tasks.size(); ++i) {
        auto it = done.find(tasks[i].id);
        if (it != done.end()) {
            rows[i] = it->second;
        } else {
            pending.push_back(static_cast<int>(i));
        }
    }

    std::mutex ledger_mutex;
    std::ofstream ledger(lpath, std::ios::app);
    std::atomic<size_t> next{0};
    std::atomic<int> n_computed{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            const size_t k = next.fetch_add(1);
            if (k >= pending.size()) return;
            const int i = pending[k];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                json row = tasks[static_cast<size_t>(i)].run();
                const double wall =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                json entry = {{"hash", hashstr},   {"experiment", exp},
                              {"point", tasks[static_cast<size_t>(i)].id},
                              {"status", "done"},  {"walltime_s", wall},
                              {"row", row}};
                {
                    std::lock_guard<std::mutex> lock(ledger_mutex);
                    ledger << entry.dump() << "\n";
                    ledger.flush();
                }
                rows[static_cast<size_t>(i)] = std::move(row);
                ++n_computed;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int n_workers = opts.workers > 0 ? opts.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(pending.size())));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    computed += n_computed.load();
    return rows;
}

void write_csv(const std::string& path, const std::vector<std::string>& cols,
               const std::vector<json>& rows, std::uint64_t hash) {
    std::ofstream out(path);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    out << "# catconfine config=" << hex_hash(hash) << " generated=" << now << "\n";
    for (size_t c = 0; c < cols.size(); ++c) out << cols[c] << (c + 1 < cols.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (size_t c = 0; c < cols.size(); ++c) {
            const auto& v = row.at(cols[c]);
            if (v.is_null()) {
                // empty cell
            } else if (v.is_string()) {
                out << v.get<std::string>();
            } else {
                out << fmt_num(v.get<double>());
            }
            out << (c + 1 < cols.size() ? "," : "\n");
        }
    }
}

// -------------------------------------------------------------- shared glue

EvolveOptions evolve_opts(const json& cfg) {
    EvolveOptions o;
    if (cfg.contains("tolerances")) {
        o.rtol = cfg["tolerances"].value("rtol", o.rtol);
        o.atol = cfg["tolerances"].value("atol", o.atol);
    }
#ifdef _OPENMP
    o.kernel = Kernel::openmp;
#endif
    return o;
}

OscillatorSpace space_for(const json& cfg, double alpha2) {
    const Complex alpha(std::sqrt(alpha2), 0.0);
    return make_space(alpha, cfg.value("truncation_override", 0));
}

NoiseConfig noise_for(const json& cfg) {
    NoiseConfig n;
    if (cfg.contains("noise")) {
        n.kappa1 = cfg["noise"].value("kappa1", 0.0);
        n.n_th = cfg["noise"].value("n_th", 0.0);
        n.kappa_phi = cfg["noise"].value("kappa_phi", 0.0);
    }
    return n;
}

ConfinementConfig confinement_for(const json& cfg) {
    ConfinementConfig c;
    if (cfg.contains("confinement")) {
        c.kappa2 = cfg["confinement"].value("kappa2", 0.0);
        c.kerr = cfg["confinement"].value("kerr", 0.0);
        c.g2 = cfg["confinement"].value("g2", 0.0);
    }
    return c;
}

GateScheme scheme_from(const std::string& name) {
    if (name == "dissipative") return GateScheme::dissipative;
    if (name == "combined_kerr") return GateScheme::combined_kerr;
    if (name == "combined_tpe") return GateScheme::combined_tpe;
    throw ConfigError("unknown scheme: " + name);
}

std::vector<std::string> scheme_names(const json& cfg) {
    std::vector<std::string> out;
    if (cfg.contains("schemes")) {
        for (const auto& s : cfg["schemes"]) out.push_back(s.get<std::string>());
    } else {
        out.push_back(cfg.value("scheme", "dissipative"));
    }
    return out;
}

// Model rate for the configured confinement at one alpha2.
double model_rate(const ConfinementConfig& conf, const NoiseConfig& noise, double alpha2,
                  int n_max = 8) {
    const double kl = noise.kappa_l(alpha2);
    const double kconf = conf.kappa_conf(alpha2);
    const OscillatorSpace sp = make_space(Complex(std::sqrt(alpha2), 0.0));
    if (conf.g2 > 0) {
        return combined_tpe_rate(kl, alpha2, kconf, tpe_spectrum(sp, n_max), conf.g2);
    }
    if (conf.kerr > 0) {
        return combined_kerr_rate(kl, alpha2, kconf, kerr_spectrum(sp, n_max), conf.kerr);
    }
    return kl * std::exp(-2.0 * alpha2) + noise.kappa1 * alpha2 * std::exp(-4.0 * alpha2);
}

json idle_point(const json& cfg, const RunOptions& opts, const ConfinementConfig& conf,
                double alpha2) {
    const NoiseConfig noise = noise_for(cfg);
    const OscillatorSpace sp = space_for(cfg, alpha2);
    const double kconf = conf.kappa_conf(alpha2);
    const double t_max = cfg.value("t_max_factor", 10.0) / kconf;
    const int n_out = cfg.value("n_out", 121);
    Trajectory traj = idle_error_probabilities(sp, conf, noise, t_max, n_out, evolve_opts(cfg));
    const RateFit fit = fit_exponential_rate(traj, kconf);

    // Per-point trajectory CSV (t, p_X, p_Z, trace_error).
    char name[96];
    std::snprintf(name, sizeof name, "idle_a2_%g.csv", alpha2);
    std::string path = opts.out_dir + "/" + name;
    if (opts.force || !fs::exists(path)) {
        std::ofstream out(path);
        out << "t,p_X,p_Z,trace_error\n";
        for (int i = 0; i < traj.times.size(); ++i) {
            out << fmt_num(traj.times(i)) << "," << fmt_num(traj.px(i)) << ","
                << fmt_num(traj.pz(i)) << "," << fmt_num(traj.trace_error) << "\n";
        }
    }

    json row;
    row["alpha2"] = alpha2;
    row["kappa_l"] = noise.kappa_l(alpha2);
    row["Gamma_sim"] = fit.rate;
    row["Gamma_model"] = model_rate(conf, noise, alpha2);
    row["r_squared"] = fit.r_squared;
    row["trajectory_csv"] = std::string(name);
    return row;
}

// -------------------------------------------------------------- experiments

int run_spectrum(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const int n_max = cfg.value("n_max", 6);
    std::vector<Task> tasks;
    for (const std::string& scheme : scheme_names(cfg)) {
        for (double a2 : grid_values(cfg, "alpha2")) {
            char id[64];
            std::snprintf(id, sizeof id, "%s_a2_%g", scheme.c_str(), a2);
            tasks.push_back({id, [=]() {
                const OscillatorSpace sp = space_for(cfg, a2);
                const ConfinedSpectrum s = (scheme == "tpe" || scheme == "combined_tpe")
                                               ? tpe_spectrum(sp, n_max)
                                               : kerr_spectrum(sp, n_max);
                json levels = json::array();
                for (int n = 0; n <= n_max; ++n) {
                    json lvl;
                    lvl["n"] = n;
                    lvl["e_even"] = s.eigenvalues_even(n);
                    lvl["e_odd"] = s.eigenvalues_odd(n);
                    lvl["spacing"] = n > 0 ? s.spacings(n - 1) : 0.0;
                    lvl["overlap"] = n > 0 ? s.overlaps(n - 1) : 0.0;
                    levels.push_back(lvl);
                }
                json row;
                row["scheme"] = scheme;
                row["alpha2"] = a2;
                row["levels"] = levels;
                return row;
            }});
        }
    }
    auto rows = run_tasks(cfg, opts, "spectrum", tasks, computed);

    std::vector<json> flat;
    for (const auto& row : rows) {
        for (const auto& lvl : row["levels"]) {
            json r = lvl;
            r["scheme"] = row["scheme"];
            r["alpha2"] = row["alpha2"];
            r["n"] = lvl["n"].get<int>() * 1.0;
            flat.push_back(r);
        }
    }
    write_csv(opts.out_dir + "/spectrum.csv",
              {"scheme", "alpha2", "n", "e_even", "e_odd", "spacing", "overlap"}, flat,
              config_hash(cfg));
    return computed;
}

int run_idle_bitflip(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const ConfinementConfig conf = confinement_for(cfg);
    std::vector<Task> tasks;
    for (double a2 : grid_values(cfg, "alpha2")) {
        char id[64];
        std::snprintf(id, sizeof id, "a2_%g", a2);
        tasks.push_back({id, [=, &opts]() { return idle_point(cfg, opts, conf, a2); }});
    }
    auto rows = run_tasks(cfg, opts, "idle-bitflip", tasks, computed);
    write_csv(opts.out_dir + "/idle_summary.csv",
              {"alpha2", "kappa_l", "Gamma_sim", "Gamma_model", "r_squared"}, rows,
              config_hash(cfg));

    if (rows.size() >= 3) {
        std::map<double, double> rates;
        for (const auto& r : rows) rates[r["alpha2"].get<double>()] = r["Gamma_sim"].get<double>();
        const GammaFit gfit = fit_gamma(rates);
        std::ofstream out(opts.out_dir + "/idle_gamma.json");
        out << json{{"gamma", gfit.gamma}, {"c0", gfit.c0}, {"residual", gfit.residual}}.dump(2)
            << "\n";
    }
    return computed;
}

int run_gamma_map(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const std::string scheme = cfg.value("scheme", "tpe");
    std::vector<Task> tasks;
    for (double ratio : grid_values(cfg, "ratio")) {
        for (double a2 : grid_values(cfg, "alpha2")) {
            char id[64];
            std::snprintf(id, sizeof id, "r_%g_a2_%g", ratio, a2);
            tasks.push_back({id, [=, &opts]() {
                ConfinementConfig conf = confinement_for(cfg);
                if (conf.kappa2 <= 0) conf.kappa2 = 1.0;
                if (scheme == "tpe") {
                    conf.g2 = ratio * conf.kappa2;
                } else {
                    conf.kerr = ratio * conf.kappa2;
                }
                json row = idle_point(cfg, opts, conf, a2);
                row["ratio"] = ratio;
                row["scheme"] = scheme;
                return row;
            }});
        }
    }
    auto rows = run_tasks(cfg, opts, "gamma-map", tasks, computed);

    // gamma per ratio over the alpha2 grid
    std::map<double, std::map<double, double>> by_ratio;
    for (const auto& r : rows) {
        by_ratio[r["ratio"].get<double>()][r["alpha2"].get<double>()] =
            r["Gamma_sim"].get<double>();
    }
    std::map<double, double> gamma_of_ratio;
    for (const auto& [ratio, rates] : by_ratio) {
        if (rates.size() >= 3) gamma_of_ratio[ratio] = fit_gamma(rates).gamma;
    }
    std::vector<json> flat;
    for (auto& r : rows) {
        json f = r;
        const double ratio = r["ratio"].get<double>();
        const auto it = gamma_of_ratio.find(ratio);
        f["gamma"] = (it != gamma_of_ratio.end()) ? json(it->second) : json();
        flat.push_back(f);
    }
    write_csv(opts.out_dir + "/gamma_map.csv",
              {"scheme", "alpha2", "ratio", "Gamma_sim", "Gamma_model", "gamma"}, flat,
              config_hash(cfg));
    return computed;
}

int run_zgate(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const double theta = cfg.value("theta", 3.14159265358979323846);
    const DriveShape shape = cfg.value("drive_shape", std::string("constant")) == "superadiabatic"
                                 ? DriveShape::superadiabatic
                                 : DriveShape::constant;
    std::vector<Task> tasks;
    for (const std::string& sname : scheme_names(cfg)) {
        for (double a2 : grid_values(cfg, "alpha2")) {
            for (double T : grid_values(cfg, "T")) {
                char id[96];
                std::snprintf(id, sizeof id, "%s_a2_%g_T_%g", sname.c_str(), a2, T);
                tasks.push_back({id, [=]() {
                    const GateScheme scheme = scheme_from(sname);
                    ZGateConfig zc;
                    zc.theta = theta;
                    zc.T_gate = T;
                    zc.drive_shape = shape;
                    zc.confinement = confinement_for(cfg);
                    if (scheme == GateScheme::dissipative) {
                        zc.confinement.kerr = 0;
                        zc.confinement.g2 = 0;
                    } else if (scheme == GateScheme::combined_kerr) {
                        zc.confinement.g2 = 0;
                    } else {
                        zc.confinement.kerr = 0;
                    }
                    zc.noise = noise_for(cfg);
                    const OscillatorSpace sp = space_for(cfg, a2);
                    const GateErrorReport rep = zgate_simulate(sp, zc, evolve_opts(cfg));
                    const double ham =
                        scheme == GateScheme::combined_kerr ? zc.confinement.kerr
                                                            : zc.confinement.g2;
                    json row;
                    row["scheme"] = sname;
                    row["alpha2"] = a2;
                    row["T"] = T;
                    row["p_z_sim"] = rep.p_z;
                    row["p_z_na_model"] =
                        zgate_na_model(scheme, a2, theta, T, zc.confinement.kappa2, ham);
                    row["p_z_total_model"] = zgate_total_model(
                        scheme, a2, theta, T, zc.confinement.kappa2, ham, zc.noise.kappa1);
                    row["trace_error"] = rep.trace_error;
                    return row;
                }});
            }
        }
    }
    auto rows = run_tasks(cfg, opts, "zgate", tasks, computed);
    write_csv(opts.out_dir + "/zgate.csv",
              {"scheme", "alpha2", "T", "p_z_sim", "p_z_na_model", "p_z_total_model",
               "trace_error"},
              rows, config_hash(cfg));
    return computed;
}

int run_cnot(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const bool with_bitflip = cfg.value("with_bitflip", false);
    std::vector<Task> tasks;
    for (const std::string& sname : scheme_names(cfg)) {
        for (double a2 : grid_values(cfg, "alpha2")) {
            for (double T : grid_values(cfg, "T")) {
                char id[96];
                std::snprintf(id, sizeof id, "%s_a2_%g_T_%g", sname.c_str(), a2, T);
                tasks.push_back({id, [=]() {
                    const GateScheme scheme = scheme_from(sname);
                    CnotConfig cc;
                    cc.scheme = scheme;
                    cc.T_gate = T;
                    cc.confinement = confinement_for(cfg);
                    if (scheme == GateScheme::dissipative) {
                        cc.confinement.kerr = 0;
                        cc.confinement.g2 = 0;
                    } else if (scheme == GateScheme::combined_kerr) {
                        cc.confinement.g2 = 0;
                    } else {
                        cc.confinement.kerr = 0;
                    }
                    cc.noise = noise_for(cfg);
                    const OscillatorSpace sp = space_for(cfg, a2);
                    const GateErrorReport rep =
                        cnot_simulate(sp, cc, with_bitflip, evolve_opts(cfg));
                    const double ham =
                        scheme == GateScheme::combined_kerr ? cc.confinement.kerr
                                                            : cc.confinement.g2;
                    const CnotBreakdown model = cnot_loss_model(
                        scheme, a2, T, cc.confinement.kappa2, ham, cc.noise.kappa1);
                    json row;
                    row["scheme"] = sname;
                    row["alpha2"] = a2;
                    row["T"] = T;
                    row["p_zc"] = rep.p_zc;
                    row["p_zt"] = rep.p_zt;
                    row["p_zczt"] = rep.p_zczt;
                    row["p_z_total"] = rep.p_z;
                    row["p_x"] = rep.p_x;
                    row["model_p_zc"] = model.p_zc;
                    row["model_p_zt"] = model.p_zt;
                    row["model_na"] =
                        cnot_na_model(scheme, a2, T, cc.confinement.kappa2, ham);
                    row["trace_error"] = rep.trace_error;
                    return row;
                }});
            }
        }
    }
    auto rows = run_tasks(cfg, opts, "cnot", tasks, computed);
    write_csv(opts.out_dir + "/cnot.csv",
              {"scheme", "alpha2", "T", "p_zc", "p_zt", "p_zczt", "p_z_total", "p_x",
               "model_p_zc", "model_p_zt", "model_na", "trace_error"},
              rows, config_hash(cfg));
    return computed;
}

int run_buffer_noise(const json& cfg, const RunOptions& opts) {
    int computed = 0;
    const std::string axis = cfg.value("axis", "kappa_bh");
    const bool bitflip = cfg.value("with_bitflip", false);
    std::vector<Task> tasks;
    for (double a2 : grid_values(cfg, "alpha2")) {
        for (double T : grid_values(cfg, "T")) {
            for (double value : grid_values(cfg, "values")) {
                char id[96];
                std::snprintf(id, sizeof id, "a2_%g_T_%g_v_%g", a2, T, value);
                tasks.push_back({id, [=]() {
                    ZGateConfig zc;
                    zc.T_gate = T;
                    zc.confinement = confinement_for(cfg);
                    zc.noise = noise_for(cfg);
                    BufferConfig buf;
                    buf.levels = cfg.value("buffer_levels", 2);
                    if (axis == "chi_hh") {
                        buf.chi_hh = value;
                        if (buf.levels == 2) buf.levels = cfg.value("buffer_levels", 4);
                    } else if (axis == "kappa_bh") {
                        buf.kappa_bh = value;
                    } else if (axis == "n_th_h") {
                        buf.kappa_bh = cfg.value("kappa_bh", 0.0);
                        buf.n_th_h = value;
                    } else if (axis == "kappa_phi_h") {
                        buf.kappa_bh = cfg.value("kappa_bh", 0.0);
                        buf.kappa_phi_h = value;
                    } else {
                        throw ConfigError("unknown buffer axis: " + axis);
                    }
                    const OscillatorSpace sp = space_for(cfg, a2);
                    const GateErrorReport rep =
                        zgate_simulate_buffer(sp, zc, buf, evolve_opts(cfg));
                    json row;
                    row["axis"] = axis;
                    row["alpha2"] = a2;
                    row["T"] = T;
                    row["value"] = value;
                    row["p_z"] = rep.p_z;
                    row["p_x"] = bitflip ? zgate_bitflip_buffer(sp, zc, buf, evolve_opts(cfg))
                                         : 0.0;
                    return row;
                }});
            }
        }
    }
    auto rows = run_tasks(cfg, opts, "buffer-noise", tasks, computed);
    write_csv(opts.out_dir + "/buffer_noise.csv",
              {"axis", "alpha2", "T", "value", "p_z", "p_x"}, rows, config_hash(cfg));
    return computed;
}

int run_circuit_params(const json& cfg, const RunOptions& opts) {
    CircuitParams p;
    const json& pj = cfg.at("params");
    p.E_J = pj.value("E_J", 0.0);
    p.eta = pj.value("eta", 0.0);
    p.phi_a = pj.value("phi_a", 0.0);
    p.phi_h = pj.value("phi_h", 0.0);
    p.phi_l = pj.value("phi_l", 0.0);
    p.eps1 = pj.value("eps1", 0.0);
    p.eps2 = pj.value("eps2", 0.0);
    p.omega_a = pj.value("omega_a", 0.0);
    p.omega_h = pj.value("omega_h", 0.0);
    p.omega_l = pj.value("omega_l", 0.0);
    p.kappa_a = pj.value("kappa_a", 0.0);
    p.kappa_bh = pj.value("kappa_bh", 0.0);
    p.kappa_bl = pj.value("kappa_bl", 0.0);
    p.omega_a_shifted = pj.value("omega_a_shifted", 0.0);
    p.omega_h_shifted = pj.value("omega_h_shifted", 0.0);
    p.omega_l_shifted = pj.value("omega_l_shifted", 0.0);

    const double alpha2 = cfg.value("alpha2", 0.0);
    const EffectiveCouplings c = coupling_strengths(p, alpha2);
    const HierarchyReport h = hierarchy_check(c, cfg.value("target_ratio", 0.0));

    json out;
    out["g2h"] = {{"re", c.g2h.real()}, {"im", c.g2h.imag()}};
    out["g2l"] = {{"re", c.g2l.real()}, {"im", c.g2l.imag()}};
    out["chi_aa"] = c.chi_aa;
    out["chi_hh"] = c.chi_hh;
    out["chi_ll"] = c.chi_ll;
    out["chi_ah"] = c.chi_ah;
    out["chi_al"] = c.chi_al;
    out["chi_lh"] = c.chi_lh;
    out["s1"] = {{"re", c.s1.real()}, {"im", c.s1.imag()}};
    out["s2"] = {{"re", c.s2.real()}, {"im", c.s2.imag()}};
    out["zeta_h"] = {{"re", c.zeta_h.real()}, {"im", c.zeta_h.imag()}};
    out["zeta_l"] = {{"re", c.zeta_l.real()}, {"im", c.zeta_l.imag()}};
    out["kappa2_eff"] = c.kappa2_eff;
    out["hierarchy"] = {{"margin_small_vs_g2", h.margin_small_vs_g2},
                        {"margin_g2_vs_chihh", h.margin_g2_vs_chihh},
                        {"pass_small_vs_g2", h.pass_small_vs_g2},
                        {"pass_g2_vs_chihh", h.pass_g2_vs_chihh},
                        {"achieved_ratio", h.achieved_ratio},
                        {"recommendations", h.recommendations}};

    fs::create_directories(opts.out_dir);
    {
        std::ofstream jf(opts.out_dir + "/circuit_couplings.json");
        jf << out.dump(2) << "\n";
    }
    {
        std::ofstream tf(opts.out_dir + "/circuit_couplings.txt");
        tf << "quantity        value\n";
        tf << "|g2h|           " << fmt_num(std::abs(c.g2h)) << "\n";
        tf << "|g2l|           " << fmt_num(std::abs(c.g2l)) << "\n";
        tf << "chi_aa          " << fmt_num(c.chi_aa) << "\n";
        tf << "chi_hh          " << fmt_num(c.chi_hh) << "\n";
        tf << "chi_ll          " << fmt_num(c.chi_ll) << "\n";
        tf << "chi_ah          " << fmt_num(c.chi_ah) << "\n";
        tf << "chi_al          " << fmt_num(c.chi_al) << "\n";
        tf << "chi_lh          " << fmt_num(c.chi_lh) << "\n";
        tf << "kappa2_eff      " << fmt_num(c.kappa2_eff) << "\n";
        tf << "hierarchy       " << (h.pass_small_vs_g2 && h.pass_g2_vs_chihh ? "pass" : "fail")
           << " (margins " << fmt_num(h.margin_small_vs_g2) << ", "
           << fmt_num(h.margin_g2_vs_chihh) << ")\n";
    }
    return 1;
}

}  // namespace

int run_experiment(const nlohmann::json& cfg, const RunOptions& opts) {
    const ValidationReport rep = validate_config(cfg);
    if (!rep.ok()) {
        std::string msg = "invalid config:";
        for (const auto& f : rep.findings) {
            if (f.fatal) msg += " [" + f.path + "] " + f.message + ";";
        }
        throw ConfigError(msg);
    }
    const std::string exp = cfg["experiment"].get<std::string>();
    if (exp == "spectrum") return run_spectrum(cfg, opts);
    if (exp == "idle-bitflip") return run_idle_bitflip(cfg, opts);
    if (exp == "gamma-map") return run_gamma_map(cfg, opts);
    if (exp == "zgate") return run_zgate(cfg, opts);
    if (exp == "cnot") return run_cnot(cfg, opts);
    if (exp == "buffer-noise") return run_buffer_noise(cfg, opts);
    if (exp == "circuit-params") return run_circuit_params(cfg, opts);
    throw ConfigError("unknown experiment: " + exp);
}

}  // namespace catsim
