#include "asiplab/coupling/exponent_fit.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "asiplab/common/error.hpp"

namespace asiplab::coupling {

namespace {
constexpr std::size_t kMinPoints = 8;
}

ExponentFit exponent_fit(std::span<const double> n, std::span<const double> values, FitWindow window,
                         double confidence) {
    if (n.size() != values.size()) throw InputError("exponent_fit: n and values differ in length");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("exponent_fit: confidence must lie in (0, 1)");
    ExponentFit fit;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !std::isfinite(n[i])) throw InputError("exponent_fit: n must be positive and finite");
        if (n[i] < window.lo || n[i] > window.hi) continue;
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw InputError("exponent_fit: values must be finite and non-negative");
        ++fit.points;
        if (values[i] == 0.0) {
            ++fit.zeros_dropped;
            continue;
        }
        x.push_back(std::log(n[i]));
        y.push_back(std::log(values[i]));
    }
    if (fit.points < kMinPoints)
        throw FitError("exponent_fit: " + std::to_string(fit.points) + " points in window, need at least 8");
    if (x.empty()) {
        fit.all_zero = true;
        fit.slope = fit.ci_low = fit.ci_high = -std::numeric_limits<double>::infinity();
        fit.intercept = -std::numeric_limits<double>::infinity();
        return fit;
    }
    const std::size_t m = x.size();
    if (m < 3) throw FitError("exponent_fit: fewer than 3 non-zero values");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("exponent_fit: all n coincide");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double meat = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        meat += (x[i] - mx) * (x[i] - mx) * e * e;
    }
    const double dof = static_cast<double>(m - 2);
    fit.std_error = std::sqrt(static_cast<double>(m) / dof * meat) / sxx;
    const boost::math::students_t t(dof);
    const double q = boost::math::quantile(t, 0.5 + 0.5 * confidence);
    fit.ci_low = fit.slope - q * fit.std_error;
    fit.ci_high = fit.slope + q * fit.std_error;
    return fit;
}

}  // namespace asiplab::coupling
