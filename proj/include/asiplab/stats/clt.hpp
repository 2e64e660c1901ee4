#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/stats/verdict.hpp"

namespace asiplab::stats {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// z_k = L^{-1} S_k / sqrt N with Sigma = L L^T.  Throws InputError when
/// Sigma is not positive definite.
RowMatrix whiten(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1); asymptotic p-value
/// with Stephens' finite-n correction.
KsResult ks_normal(std::span<const double> z);

/// Energy statistic of z against N(0, I_d):
///   n (2/n sum E|z_i - Z| - E|Z - Z'| - 1/n^2 sum |z_i - z_j|).
double energy_statistic(const RowMatrix& z);

/// E|a - Z| for Z ~ N(0, I_d) as a function of r = |a|.
double expected_normal_distance(int d, double r);

struct CltOptions {
    int bootstrap = 199;
    std::uint64_t seed = 0x5eedc17;
    unsigned workers = 1;
    /// Sigma was estimated from the same samples (second moment about 0);
    /// the bootstrap then re-estimates it on every replicate.
    bool sigma_estimated = false;
    double alpha = 0.01;
};

struct CltResult {
    std::vector<KsResult> ks;  ///< per whitened coordinate
    double max_ks = 0.0;
    double energy = 0.0;
    double energy_p = 1.0;
    std::vector<double> bootstrap;  ///< null replicates of the energy statistic
    Verdict verdict;               ///< energy p-value > alpha
};

/// Per-coordinate KS after whitening and the bootstrap energy test.
/// Replicate b draws from derive_seed(seed, b), so the result does not
/// depend on the worker count.
CltResult clt_test(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma,
                   const CltOptions& options = {});

}  // namespace asiplab::stats
