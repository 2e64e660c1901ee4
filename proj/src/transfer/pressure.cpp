#include "asiplab/transfer/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asiplab/common/error.hpp"

namespace asiplab::transfer {

std::complex<double> pressure(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                              const TwistOptions& options) {
    const auto c = centred(op.space(), phi);
    return twisted_eigenvalue(op, c, u, options).pressure;
}

PressureExpansion sigma_from_pressure(const TransferOperator& op, const CylinderFunction& phi,
                                      const PressureOptions& options) {
    const auto c = centred(op.space(), phi);
    const int d = c.dim;
    double scale = 0.0;
    for (double v : c.values) scale = std::max(scale, std::abs(v));

    PressureExpansion out;
    out.eigen_gap = eigen_gap(op);
    out.sigma = Eigen::MatrixXd::Zero(d, d);
    out.p3 = Eigen::VectorXd::Zero(d);
    if (scale == 0.0) return out;
    const double h = options.h0 * out.eigen_gap / scale;
    out.step = h;

    auto p_at = [&](const std::vector<double>& dir, double t) {
        std::vector<double> u(dir.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = t * dir[i];
        return twisted_eigenvalue(op, c, u, options.twist).pressure;
    };
    // Re P is even in t and vanishes at 0, so the five-point second
    // derivative reduces to (32 f(h) - 2 f(2h)) / (12 h^2).
    auto quadratic_form = [&](const std::vector<double>& dir) {
        const double f1 = p_at(dir, h).real(), f2 = p_at(dir, 2 * h).real();
        return -(32.0 * f1 - 2.0 * f2) / (12.0 * h * h);
    };
    std::vector<double> e(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        std::fill(e.begin(), e.end(), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        out.sigma(i, i) = quadratic_form(e);
        // Im P(t e) = a t^3 + b t^5 + ...; eliminate b between t = h and 2h
        const double g1 = p_at(e, h).imag(), g2 = p_at(e, 2 * h).imag();
        out.p3(i) = -(32.0 * g1 - g2) / (24.0 * h * h * h);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[static_cast<std::size_t>(i)] = 1.0;
            e[static_cast<std::size_t>(j)] = 1.0;
            const double q = quadratic_form(e);
            out.sigma(i, j) = out.sigma(j, i) = 0.5 * (q - out.sigma(i, i) - out.sigma(j, j));
        }
    }
    return out;
}

}  // namespace asiplab::transfer
