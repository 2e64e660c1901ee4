#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asiplab/stats/verdict.hpp"

namespace asiplab::stats {

struct ReturnTimeSample {
    std::vector<std::uint64_t> times;
    std::string source;
};

struct MomentEstimate {
    double q = 0.0;
    double mean = 0.0;  ///< sample E[R^q]
    double stderr_ = 0.0;
};

struct TailFitOptions {
    /// The regression starts where the empirical survival drops below this.
    double start_survival = 3e-3;
    /// ...and stops at the last r with at least this many samples above it.
    std::size_t min_tail_count = 100;
    std::size_t grid_points = 24;
    std::size_t min_samples = 100'000;
    double declared_p = 3.0;
    std::vector<double> moment_orders{1.0, 2.0, 3.0, 4.0};
    double confidence = 0.95;
};

struct TailFit {
    bool bounded = false;        ///< no tail to fit; every moment is finite
    double exponent = 0.0;       ///< alpha in P(R > r) ~ r^{-alpha}
    double ci_low = 0.0;
    double ci_high = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    std::vector<double> r;
    std::vector<double> survival;
    std::vector<MomentEstimate> moments;
    std::size_t samples = 0;
    bool enough_samples = true;
};

/// Log-log regression of the empirical survival P(R > r) over its upper
/// tail.  With fewer than `min_samples` samples the CI is doubled and any
/// verdict drawn from it is inconclusive.
TailFit return_tail_fit(const ReturnTimeSample& sample, const TailFitOptions& options = {});

/// "R in L^p": pass when the CI of alpha lies above p, fail when below,
/// inconclusive when it straddles p or the sample is small.
Verdict lp_verdict(const TailFit& fit, double p);

void export_csv(const TailFit& fit, const std::filesystem::path& path);

}  // namespace asiplab::stats
