#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "asiplab/blocking/approximant.hpp"
#include "asiplab/blocking/schedule.hpp"
#include "asiplab/coupling/exponent_fit.hpp"

namespace asiplab::blocking {

/// Long and short block sums of eta_l over the blocks covering a series.
/// All per-block arrays are row-major (block j-1, component c).
struct BlockDecomposition {
    int dim = 1;
    std::size_t blocks = 0;       ///< M: blocks touched by the series
    std::uint64_t length = 0;     ///< series length decomposed
    bool last_partial = false;    ///< series ends inside block M
    std::vector<double> y;        ///< long-block sums of eta_l
    std::vector<double> z;        ///< short-block sums of eta_l
    std::vector<double> residuals;  ///< per-block sums of eta - eta_l
    /// max over components of |sum_j (y_j + z_j + r_j) - sum_n eta_n|.
    double telescoping_error = 0.0;

    double y_at(std::size_t j, int c = 0) const { return y[(j - 1) * static_cast<std::size_t>(dim) + c]; }
    double z_at(std::size_t j, int c = 0) const { return z[(j - 1) * static_cast<std::size_t>(dim) + c]; }
    double residual_at(std::size_t j, int c = 0) const {
        return residuals[(j - 1) * static_cast<std::size_t>(dim) + c];
    }
};

/// Throws InputError when eta and eta_l disagree in length or the schedule
/// does not reach the series length.
BlockDecomposition decompose(const ApproximantSeries& series, const BlockSchedule& schedule);

/// Root-mean-square |y_j| across decompositions, for every block j that is
/// complete in all of them.
std::vector<double> long_block_rms(std::span<const BlockDecomposition> decompositions);

/// Per-checkpoint remainder quantities of one trajectory (Euclidean norms):
///   z_sum     |sum_{j <= M_N} z_j|
///   max_tail  A_{M_N} = max_{P_{M-1} < N' <= P_M} |sum_{n = N'+1}^{P_M} eta_n|
///   residual  |sum_{n <= P_{M_N}} (eta_n - eta_ln)|
///   residual_abs  running sum_{n <= N} |eta_n - eta_ln|
struct RemainderSample {
    std::vector<double> z_sum;
    std::vector<double> max_tail;
    std::vector<double> residual;
    std::vector<double> residual_abs;
};

/// The series must extend to P_{M_N} for the last checkpoint N.
RemainderSample remainder_sample(const ApproximantSeries& series, const BlockSchedule& schedule,
                                 std::span<const std::uint64_t> checkpoints);

struct RemainderDiagnostics {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> z_rms, tail_rms, residual_rms;
    coupling::ExponentFit z_fit, tail_fit, residual_fit;
    double z_bound = 0.0;     ///< (1/2 + alpha/2) / (1 + Q) + slack
    double tail_bound = 0.0;  ///< (Q/2) / (1 + Q) + slack
    bool z_ok = false;
    bool tail_ok = false;
    /// First checkpoint index after which the ensemble-mean running residual
    /// sum moves by less than the tolerance; -1 when it never settles.
    std::int64_t residual_settled = -1;
};

/// Ensemble RMS over samples, then log-log slopes against N.  Fewer than 8
/// checkpoints raise FitError.
RemainderDiagnostics remainder_diagnostics(std::span<const RemainderSample> samples,
                                           std::span<const std::uint64_t> checkpoints, const BlockSchedule& schedule,
                                           double slack = 0.1, double residual_tolerance = 1e-9);

using ApproximantGenerator = std::function<ApproximantSeries(std::uint64_t seed)>;

/// remainder_sample over `count` trajectories with seeds derive_seed(master, i),
/// spread over `workers` threads; results are ordered by trajectory.
std::vector<RemainderSample> remainder_ensemble(const ApproximantGenerator& generate, const BlockSchedule& schedule,
                                                std::span<const std::uint64_t> checkpoints, std::size_t count,
                                                std::uint64_t master_seed, unsigned workers = 0);

}  // namespace asiplab::blocking
