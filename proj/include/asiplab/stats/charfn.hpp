#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/coupling/exponent_fit.hpp"
#include "asiplab/simulate/ensemble.hpp"
#include "asiplab/stats/verdict.hpp"

namespace asiplab::stats {

/// Exact characteristic function (u, N) -> E exp(i <u, S_N> / sqrt N).
using ExactCharFn = std::function<std::complex<double>(std::span<const double> u, std::uint64_t N)>;

/// Ensemble mean of exp(i <u, S_N> / sqrt N); samples are K x d row-major.
std::complex<double> empirical_char_fn(std::span<const double> samples, int dim, std::uint64_t N,
                                       std::span<const double> u);

/// g(u) = exp(-<u, Sigma u> / 2).
double gaussian_char_fn(const Eigen::MatrixXd& sigma, std::span<const double> u);

struct CharFnPoint {
    std::uint64_t N = 0;
    double deviation = 0.0;          ///< D_N = max_u |f_N(u) - g(u)| from the ensemble
    double argmax = 0.0;             ///< |u| where the maximum is attained
    double max_stderr = 0.0;         ///< largest MC error of f_N(u) over the grid
    std::optional<double> exact;     ///< D_N from the exact characteristic function
    std::size_t grid_used = 0;
    std::size_t trimmed = 0;         ///< grid points with |u| > epsilon sqrt N
    /// |D_N - exact| <= 3 max_stderr; unset without an exact oracle.
    std::optional<bool> matches_exact;
};

struct CharFnResult {
    std::vector<CharFnPoint> points;
    coupling::ExponentFit fit;   ///< log D_N against log N
    bool fit_on_exact = false;   ///< fitted to the exact curve rather than the MC one
    double mc_floor = 0.0;       ///< median of 3 max_stderr over N
    std::vector<std::string> warnings;
    Verdict verdict;             ///< slope <= -1/2 + slack
};

/// The grid holds d-vectors row-major.  Points with |u| > epsilon sqrt N are
/// dropped for that N with a warning.  The slope is fitted to the exact curve
/// when `exact` is given (the MC curve flattens at the noise floor K^{-1/2}),
/// otherwise to the measured D_N.
CharFnPoint char_fn_point(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma,
                          std::span<const double> grid, double epsilon, const ExactCharFn& exact = {});

CharFnResult char_fn_test(const simulate::EnsembleResult& ensemble, const Eigen::MatrixXd& sigma,
                          std::span<const double> grid, std::span<const std::uint64_t> checkpoints,
                          double epsilon = 1.0, const ExactCharFn& exact = {}, double slack = 0.05);

/// Symmetric scalar grid {-u_max, ..., u_max} with `count` points per side
/// (zero excluded).
std::vector<double> scalar_grid(double u_max, int count);

void export_csv(const CharFnResult& result, const std::filesystem::path& path);

}  // namespace asiplab::stats
