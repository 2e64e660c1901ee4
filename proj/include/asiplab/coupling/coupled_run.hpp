#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

#include "asiplab/blocking/schedule.hpp"
#include "asiplab/coupling/exponent_fit.hpp"
#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::coupling {

struct CouplingOptions {
    /// Lookahead blocks in u_j; non-positive selects the smallest K meeting
    /// `truncation_tolerance` over the run's blocks.
    int K = 0;
    double truncation_tolerance = 1e-12;
    /// Atom budget for one embedded increment.
    std::size_t max_atoms = 1'000'000;
    /// Divide the observable by the asymptotic standard deviation.
    bool normalise = true;
};

/// One realisation of the coupled pair (S, W).  Checkpoint arrays are
/// aligned with `checkpoints`; per-block arrays with blocks 1..M.
struct CouplingRecord {
    std::uint64_t seed = 0;
    int K = 0;
    double sigma = 1.0;  ///< scale the observable was divided by
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> S;          ///< S_N of the normalised observable
    std::vector<double> W;          ///< W(N)
    std::vector<double> E;          ///< S_N - W(N)
    std::vector<double> max_error;  ///< max_{n <= N} |E_n|
    std::vector<double> clock;      ///< sum_{j <= M_N} T_j
    std::vector<double> T;          ///< embedding time of block j
    std::vector<double> Y;          ///< martingale differences Y_j
    std::vector<double> W_block;    ///< W at the end of block j's embedding
    /// max_M |sum_{j <= M} Y_j - W(sum_{j <= M} T_j)|; the truncated
    /// conditional means are the only contribution beyond rounding.
    double block_mismatch = 0.0;
    /// max_M |S_{P_M} reconstructed from Y, u, short blocks - direct S_{P_M}|.
    double reconstruction_error = 0.0;
};

/// Couple the partial sums of the symbol observable `values` (centred
/// exactly, then optionally divided by sigma from the transfer operator) with
/// a Brownian motion.  Runs whole blocks until n_max symbols are drawn and
/// the Brownian clock passes n_max.
CouplingRecord coupled_run(const systems::MarkovShiftModel& model, std::span<const double> values,
                           const blocking::BlockSchedule& schedule, std::uint64_t n_max,
                           std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                           const CouplingOptions& options = {});

/// Runs seeded by derive_seed(master_seed, i), parallel across `workers`.
std::vector<CouplingRecord> coupled_ensemble(const systems::MarkovShiftModel& model, std::span<const double> values,
                                             const blocking::BlockSchedule& schedule, std::uint64_t n_max,
                                             std::span<const std::uint64_t> checkpoints, std::size_t runs,
                                             std::uint64_t master_seed, unsigned workers = 0,
                                             const CouplingOptions& options = {});

struct CouplingSummary {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> mean_max_error;  ///< ensemble mean of max_{n<=N} |E_n|
    std::vector<double> mean_clock_drift;  ///< ensemble mean of |sum T_j - N|
    ExponentFit error_fit;
    ExponentFit clock_fit;
    double max_block_mismatch = 0.0;
    std::size_t runs = 0;
};

/// Fits over checkpoints in [fit_lo, fit_hi].
CouplingSummary summarise(std::span<const CouplingRecord> records, double fit_lo, double fit_hi);

nlohmann::json to_json(const CouplingSummary& summary);

/// CSV with columns N,S_N,W_N,E_N.
void export_csv(const CouplingRecord& record, const std::filesystem::path& path);

}  // namespace asiplab::coupling
