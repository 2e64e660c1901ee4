#include "asiplab/transfer/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "asiplab/common/error.hpp"

namespace asiplab::transfer {

namespace {

double beta_lipschitz_component(const CylinderSpace& fine, const CylinderFunction& phi, double beta, int c) {
    const int n = fine.alphabet();
    // min / max per code at the current level, folded one digit at a time
    std::vector<double> lo, hi;
    std::uint64_t codes = 1;
    for (int i = 0; i < fine.depth(); ++i) codes *= static_cast<std::uint64_t>(n);
    lo.assign(codes, std::numeric_limits<double>::infinity());
    hi.assign(codes, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        lo[fine.code(i)] = std::min(lo[fine.code(i)], phi(i, c));
        hi[fine.code(i)] = std::max(hi[fine.code(i)], phi(i, c));
    }
    double norm = 0.0;
    for (int level = fine.depth(); level >= 0; --level) {
        const double weight = std::pow(beta, -level);
        for (std::uint64_t code = 0; code < codes; ++code)
            if (hi[code] >= lo[code]) norm = std::max(norm, (hi[code] - lo[code]) * weight);
        if (level == 0) break;
        const std::uint64_t coarse = codes / static_cast<std::uint64_t>(n);
        std::vector<double> nlo(coarse, std::numeric_limits<double>::infinity());
        std::vector<double> nhi(coarse, -std::numeric_limits<double>::infinity());
        for (std::uint64_t code = 0; code < codes; ++code) {
            nlo[code / n] = std::min(nlo[code / n], lo[code]);
            nhi[code / n] = std::max(nhi[code / n], hi[code]);
        }
        lo.swap(nlo);
        hi.swap(nhi);
        codes = coarse;
    }
    return norm;
}

Eigen::MatrixXd matrix_power(Eigen::MatrixXd base, std::uint64_t e) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(base.rows(), base.cols());
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

}  // namespace

MixingMeasurement cylinder_mixing(const systems::MarkovShiftModel& model, std::span<const int> a,
                                  std::span<const int> b, std::uint64_t n, double c, double tau) {
    if (a.empty() || b.empty() || !model.admissible(a) || !model.admissible(b))
        throw InputError("cylinder mixing needs admissible non-empty words");
    const auto& p = model.transition();
    const auto& pi = model.stationary();
    const double ma = model.cylinder_measure(a), mb = model.cylinder_measure(b);
    // P^{n+1} - 1 pi = (P - 1 pi)^{n+1}, which avoids cancellation at large n
    const Eigen::MatrixXd centred = p - Eigen::VectorXd::Ones(p.rows()) * pi.transpose();
    const double dev = matrix_power(centred, n + 1)(a.back(), b.front());
    const double cond_b = mb / pi(b.front());

    MixingMeasurement out;
    out.product = ma * mb;
    out.joint = out.product + ma * dev * cond_b;
    out.difference = std::abs(ma * dev * cond_b);
    if (tau < 0.0) tau = model.second_eigenvalue_modulus();
    out.bound = c * std::pow(tau, static_cast<double>(n)) * ma * std::sqrt(mb);
    out.ratio = out.bound > 0 ? out.difference / out.bound : (out.difference > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    return out;
}

MixingFit fit_mixing(const systems::MarkovShiftModel& model, std::span<const int> a, std::span<const int> b,
                     std::span<const std::uint64_t> lags) {
    std::vector<double> x, y;
    for (auto n : lags) {
        const auto m = cylinder_mixing(model, a, b, n);
        if (m.difference <= 0.0) continue;
        const double norm = model.cylinder_measure(a) * std::sqrt(model.cylinder_measure(b));
        x.push_back(static_cast<double>(n));
        y.push_back(std::log(m.difference / norm));
    }
    MixingFit fit;
    fit.points = x.size();
    if (x.size() < 2) return fit;
    const auto [icpt, slope] = ols(x, y);
    fit.c = std::exp(icpt);
    fit.tau = std::exp(slope);
    return fit;
}

double beta_lipschitz(const CylinderSpace& fine, const CylinderFunction& phi, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw InputError("beta must lie in (0, 1)");
    double norm = 0.0;
    for (int c = 0; c < phi.dim; ++c) norm = std::max(norm, beta_lipschitz_component(fine, phi, beta, c));
    return norm;
}

ApproxError cylinder_approx_error(const CylinderSpace& fine, const CylinderFunction& phi, int k, double p,
                                  double beta_norm) {
    if (k < 1 || k > fine.depth()) throw InputError("approximation depth must lie in [1, fine depth]");
    if (!(p >= 1.0)) throw InputError("approximation error needs p >= 1");
    const CylinderSpace coarse(fine.model(), k);
    const auto cond = condition_on_prefix(fine, phi, coarse);
    std::uint64_t divisor = 1;
    for (int i = k; i < fine.depth(); ++i) divisor *= static_cast<std::uint64_t>(fine.alphabet());
    const auto& m = fine.measure();
    long double acc = 0.0L;
    double sup = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto j = static_cast<std::size_t>(coarse.index_of_code(fine.code(i) / divisor));
        for (int c = 0; c < phi.dim; ++c) {
            const double e = std::abs(phi(i, c) - cond(j, c));
            sup = std::max(sup, e);
            if (std::isfinite(p)) acc += static_cast<long double>(m[i]) * std::pow(static_cast<long double>(e), p);
        }
    }
    ApproxError out;
    out.depth = k;
    out.error = std::isfinite(p) ? static_cast<double>(std::pow(acc, 1.0L / p)) : sup;
    out.bound = beta_norm * std::pow(fine.model().beta(), k);
    return out;
}

ApproxProfile cylinder_approx_profile(const CylinderSpace& fine, const CylinderFunction& phi,
                                      std::span<const int> depths, double p) {
    ApproxProfile out;
    out.beta_norm = beta_lipschitz(fine, phi, fine.model().beta());
    std::vector<double> x, y;
    for (int k : depths) {
        const auto e = cylinder_approx_error(fine, phi, k, p, out.beta_norm);
        out.points.push_back(e);
        if (e.error > 0.0) {
            x.push_back(k);
            y.push_back(std::log(e.error));
        }
    }
    out.decay_rate = x.size() >= 2 ? std::exp(ols(x, y).second) : 0.0;
    return out;
}

}  // namespace asiplab::transfer
