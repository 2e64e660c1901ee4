#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asiplab/cli/config.hpp"
#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::cli {

enum ExitCode : int { kPass = 0, kSoftFail = 1, kUsage = 2, kOverwrite = 3, kRuntime = 4 };

/// An output location already holds results and --force was not given.
class OverwriteRefused : public Error {
public:
    using Error::Error;
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e) noexcept;

/// "two-state:<flip>", "full-shift:<n>" or "matrix:<row>;<row>;..." with
/// comma-separated entries.
systems::MarkovShiftModel parse_model(const std::string& spec);
/// "pm1" or "symbol:<v0>,<v1>,..." (one value per symbol).
std::vector<double> parse_symbol_values(const std::string& spec, const systems::MarkovShiftModel& model);

struct SimulateArgs {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;  ///< overrides output.dir
    std::optional<unsigned> workers;
    bool force = false;
};
/// Writes ensemble.bin, ensemble.csv and summary.json into the output
/// directory.  The summary embeds the config, its hash and every seed, and
/// can itself be passed back as --config to replay the run.
int cmd_simulate(const SimulateArgs& args, std::ostream& log);

struct AnalyzeArgs {
    std::filesystem::path config;
    std::filesystem::path ensemble;
    std::optional<std::filesystem::path> out;  ///< verdict JSON; raw curves go beside it
    std::optional<unsigned> workers;
    bool force = false;
};
/// One verdict per configured analysis; exit 0 iff none fails.
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& log);

struct CoupleArgs {
    std::string model = "two-state:0.3";
    std::string observable = "pm1";
    std::uint64_t n_max = 100'000;
    std::uint64_t runs = 10;
    std::uint64_t seed = 1;
    double Q = 1.0;
    double alpha = 0.1;
    std::uint64_t K = 0;
    double fit_lo = 1000.0;
    unsigned workers = 1;
    std::optional<std::filesystem::path> out;
    bool force = false;
};
int cmd_couple(const CoupleArgs& args, std::ostream& out, std::ostream& log);

struct SpectraArgs {
    std::string model = "two-state:0.3";
    std::string observable = "pm1";
};
/// Sigma from the pressure Hessian and from the coboundary, plus the gap.
int cmd_spectra(const SpectraArgs& args, std::ostream& out);

struct ExponentArgs {
    int d = 1;
    std::string p = "inf";
    std::string regime = "nonuniform";
    bool json = false;
};
int cmd_exponent(const ExponentArgs& args, std::ostream& out);

struct HorizonArgs {
    std::filesystem::path table;
    int resolution = 2048;
    double cutoff = 30.0;
};
/// Exit 0 when the scan finds a finite horizon, 1 otherwise.
int cmd_horizon_check(const HorizonArgs& args, std::ostream& out);

}  // namespace asiplab::cli
