#pragma once

#include <cstddef>
#include <limits>
#include <span>

namespace asiplab::coupling {

/// Result of a log-log power-law regression value ~ C N^slope.
struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;  ///< log C
    double std_error = 0.0;  ///< heteroscedasticity-robust (HC1)
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t points = 0;         ///< points inside the window
    std::size_t zeros_dropped = 0;  ///< zero values excluded from the fit
    bool all_zero = false;          ///< every value was zero; slope is -inf

    /// True when the upper confidence limit stays at or below `bound`.
    bool upper_below(double bound) const noexcept { return ci_high <= bound; }
};

struct FitWindow {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
};

/// OLS of log(value) on log(n) over points with n in [window.lo, window.hi].
/// Needs at least 8 points in the window (FitError otherwise); zero values are
/// dropped and counted, and an all-zero series returns the -inf sentinel.
/// Negative values or non-positive n raise InputError.
ExponentFit exponent_fit(std::span<const double> n, std::span<const double> values, FitWindow window = {},
                         double confidence = 0.95);

}  // namespace asiplab::coupling
