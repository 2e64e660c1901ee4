#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asiplab/stats/verdict.hpp"
#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::stats {

struct MixingLag {
    std::uint64_t lag = 0;
    double joint = 0.0;       ///< P(a at t, b at t + lag + |a|)
    double product = 0.0;     ///< P(a) P(b)
    double difference = 0.0;  ///< joint - product (signed)
    double stderr_ = 0.0;
    double exact = 0.0;       ///< signed exact difference from the transfer module
    double z = 0.0;           ///< (difference - exact) / stderr
};

struct EmpiricalMixing {
    std::vector<MixingLag> lags;
    double c = 0.0;
    double tau = 0.0;  ///< 0 when no lag is resolved above 3 stderr
    double tau_ci_low = 0.0, tau_ci_high = 0.0;
    std::size_t fit_points = 0;
    double max_abs_z = 0.0;
    Verdict verdict;  ///< every lag within 3 stderr of the exact value
};

struct MixingSampling {
    std::size_t trajectories = 100;
    std::uint64_t length = 1'000'000;  ///< time origins per trajectory
    std::uint64_t master_seed = 0x317;
    unsigned workers = 1;
};

/// Estimates |P(AB) - P(A)P(B)| for the cylinders a, b from stationary
/// orbits, averaging over time origins; errors come from the spread across
/// trajectories.  tau and C come from a weighted fit of log|difference|
/// against the lag over lags resolved above 3 stderr.
EmpiricalMixing mixing_decay_empirical(const systems::MarkovShiftModel& model, std::span<const int> a,
                                       std::span<const int> b, std::span<const std::uint64_t> lags,
                                       const MixingSampling& sampling = {});

}  // namespace asiplab::stats
