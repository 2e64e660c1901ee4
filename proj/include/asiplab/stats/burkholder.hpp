#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "asiplab/coupling/exponent_fit.hpp"
#include "asiplab/stats/verdict.hpp"
#include "asiplab/systems/markov_shift.hpp"
#include "asiplab/transfer/coboundary.hpp"

namespace asiplab::stats {

/// Seed -> sequence Psi(F^n x), n = 0, 1, ..., at least max N long.
using KernelSequence = std::function<std::vector<double>(std::uint64_t seed)>;

struct BurkholderOptions {
    double p = 4.0;
    std::size_t trajectories = 1000;
    std::uint64_t master_seed = 0xb0b;
    unsigned workers = 1;
    /// sup |L Psi| of the supplied observable and the accepted ceiling.
    double kernel_residual = 0.0;
    double kernel_tolerance = 1e-9;
    double slope_tolerance = 0.05;
};

struct BurkholderResult {
    std::vector<std::uint64_t> n;
    std::vector<double> ratio;  ///< || max_l |sum_{l<=k<=N} Psi_k| ||_p / sqrt N
    coupling::ExponentFit fit;
    Verdict verdict;            ///< |slope| <= slope_tolerance
};

/// Throws HypothesisError when kernel_residual exceeds the tolerance and
/// InputError unless 2 < p < inf.
BurkholderResult burkholder_check(const KernelSequence& psi, std::span<const std::uint64_t> n_grid,
                                  const BurkholderOptions& options);

/// max over 1 <= l <= N of |Psi_l + ... + Psi_N| for every N in the grid
/// (1-based positions into `psi`), in one pass.
std::vector<double> suffix_maxima(std::span<const double> psi, std::span<const std::uint64_t> n_grid);

/// Psi along a stationary orbit of the chain, read from the depth-(k+1)
/// table of a coboundary decomposition.
std::vector<double> markov_kernel_sequence(const systems::MarkovShiftModel& model,
                                           const transfer::CoboundaryResult& cob, std::uint64_t length,
                                           std::uint64_t seed);

}  // namespace asiplab::stats
