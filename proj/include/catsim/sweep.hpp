#ifndef CATSIM_SWEEP_HPP
#define CATSIM_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace catsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Finding {
    std::string path;
    std::string message;
    bool fatal = false;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const {
        for (const auto& f : findings) {
            if (f.fatal) return false;
        }
        return true;
    }
};

// Schema and physics sanity checks; never runs simulations.
ValidationReport validate_config(const nlohmann::json& cfg);
ValidationReport validate_config_file(const std::string& path);

// FNV-1a over the canonical (sorted-key, no-whitespace) dump.
std::uint64_t config_hash(const nlohmann::json& cfg);

// CATCONFINE_CACHE_DIR if set, else <out_dir>.
std::string ledger_dir(const std::string& out_dir);

struct RunOptions {
    std::string out_dir = ".";
    int workers = 0;  // 0 = hardware concurrency
    bool force = false;
    std::uint64_t seed = 0;
};

// Executes the experiment grid; writes CSVs plus a JSON-lines ledger, skipping
// points already recorded for the same config hash unless force. Returns the
// number of points computed this run (resumed points not included).
int run_experiment(const nlohmann::json& cfg, const RunOptions& opts);

nlohmann::json load_config(const std::string& path);

}  // namespace catsim

#endif
