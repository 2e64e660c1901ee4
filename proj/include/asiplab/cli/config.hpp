#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "asiplab/common/error.hpp"

namespace asiplab::cli {

/// Schema violation; the message starts with the offending field path.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& field, const std::string& message)
        : InputError(field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct SystemConfig {
    std::string kind;  ///< two-state | full-shift | markov | doubling | lsv | lorentz
    double flip = 0.3;
    int symbols = 2;
    std::vector<std::vector<double>> matrix;
    double gamma = 0.3;
    std::uint64_t burn_in = 1000;
    std::string table;  ///< Lorentz table path, relative to the config file
    bool waive_horizon = false;
};

struct ObservableConfig {
    std::string kind;  ///< pm1 | symbol | cos2pi | identity | position
    std::vector<double> values;
    std::uint64_t pilot_steps = 10'000'000;
};

struct RunConfig {
    std::uint64_t n_max = 0;
    std::vector<std::uint64_t> checkpoints;  ///< empty: geometric grid
    std::uint64_t trajectories = 1;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
};

struct AnalysisConfig {
    std::string test;  ///< sigma | clt | char-fn | blocking | lil | tails | mixing
    nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
    SystemConfig system;
    ObservableConfig observable;
    RunConfig run;
    std::vector<AnalysisConfig> analyses;
    std::string output_dir;
    nlohmann::json raw;
    std::filesystem::path base_dir;  ///< directory of the config file
    std::uint64_t hash = 0;          ///< FNV-1a of the canonical dump of `raw`

    std::string hash_hex() const;
    std::filesystem::path resolve(const std::string& path) const;
};

/// Validates against the experiment schema.  Unknown keys, missing required
/// fields and out-of-range values raise ConfigError naming the field.
ExperimentConfig parse_config(const nlohmann::json& raw, const std::filesystem::path& base_dir = {});

/// Reads a config file; a run summary (object with a "config" member) is
/// accepted too so that runs can be replayed.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Keys accepted by each analysis test.
const std::vector<std::string>& analysis_keys(const std::string& test);

}  // namespace asiplab::cli
