#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/stats/verdict.hpp"

namespace asiplab::stats {

/// |z| / sqrt(2 n log log n); needs n >= 16 so that log log n > 0.
double lil_normaliser(std::uint64_t n);

/// Streams increments of S_n and tracks a_n = |Sigma^{-1/2} S_n| / sqrt(2 n log log n)
/// over the tail window n >= tail_start.
class LilTracker {
public:
    LilTracker(const Eigen::MatrixXd& sigma, std::uint64_t tail_start);

    void push(std::span<const double> increment);
    void push(double increment) { push(std::span<const double>(&increment, 1)); }

    std::uint64_t n() const noexcept { return n_; }
    double current() const;
    double tail_sup() const noexcept { return sup_; }
    std::uint64_t argsup() const noexcept { return argsup_; }
    std::uint64_t tail_start() const noexcept { return tail_start_; }

private:
    Eigen::MatrixXd inv_l_;
    Eigen::VectorXd sum_;
    std::uint64_t tail_start_;
    std::uint64_t n_ = 0;
    double sup_ = 0.0;
    std::uint64_t argsup_ = 0;
};

struct LilResult {
    std::uint64_t N = 0;
    std::uint64_t tail_start = 0;
    double tail_sup = 0.0;
    std::uint64_t argsup = 0;
    Verdict verdict;  ///< soft check: tail_sup inside [lo, hi]
};

LilResult lil_result(const LilTracker& tracker, double lo = 0.8, double hi = 1.2);

/// Synthetic IID N(0, I_d) increments; the tail window starts at
/// max(10^4, sqrt N).
LilResult iid_normal_lil(std::uint64_t N, int d, std::uint64_t seed, double lo = 0.8, double hi = 1.2);

/// Strassen-ball check of a polygonal path f(i/n) = values[i-1], f(0) = 0.
struct StrassenDistance {
    std::uint64_t n = 0;
    double energy = 0.0;    ///< integral of |f'|^2 over [0, 1]
    double sup_norm = 0.0;
    /// Upper bound on the sup-norm distance to the Strassen ball: the
    /// smaller of the radial bound sup |f - f / sqrt(energy)| and, over
    /// coarse polygons g through m = 2^k equally spaced knots,
    /// sup |f - g| + (1 - 1/sqrt(energy(g)))_+ sup |g|.
    double distance_bound = 0.0;
    std::uint64_t knots = 0;  ///< m attaining the bound; 0 for the radial one
    bool in_ball() const noexcept { return energy <= 1.0; }
};

/// Energy of the polygon through (i/n, values[i-1]) restricted to the
/// steps first+1 .. last (vertices first .. last, vertex 0 = origin).
long double polygon_energy(std::span<const double> values, int dim, std::uint64_t n, std::uint64_t first,
                           std::uint64_t last);

StrassenDistance strassen_distance(std::span<const double> values, int dim);

/// f_n(i/n) = Sigma^{-1/2} S_i / sqrt(2 n log log n), i = 1..n, from the
/// partial sums S_1, S_2, ... (row-major, at least n rows).
StrassenDistance functional_lil(std::span<const double> partial_sums, int dim, std::uint64_t n,
                                const Eigen::MatrixXd& sigma);

/// max_{k <= n} |Sigma^{-1/2} S_k| / sqrt(n) at each checkpoint n.
std::vector<double> chung_statistic(std::span<const double> partial_sums, int dim, const Eigen::MatrixXd& sigma,
                                    std::span<const std::uint64_t> checkpoints);

struct QuantileSummary {
    double q01 = 0.0, q05 = 0.0, median = 0.0, q95 = 0.0, mean = 0.0;
};

/// Linear-interpolation quantiles of a sample.
double quantile(std::vector<double> values, double q);
QuantileSummary summarise_quantiles(std::span<const double> values);

/// phi^d(u) / u * exp(-phi^2(u) / 2), the integrand of the upper/lower-class
/// criterion, evaluated at the given (u, phi(u)) pairs.
std::vector<double> class_integrand(int d, std::span<const double> u, std::span<const double> phi);

}  // namespace asiplab::stats
