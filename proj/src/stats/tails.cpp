#include "asiplab/stats/tails.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "asiplab/common/error.hpp"
#include "asiplab/coupling/exponent_fit.hpp"

namespace asiplab::stats {

TailFit return_tail_fit(const ReturnTimeSample& sample, const TailFitOptions& options) {
    if (sample.times.empty()) throw InputError("empty return-time sample");
    std::vector<std::uint64_t> t = sample.times;
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    const double dn = static_cast<double>(n);
    TailFit fit;
    fit.samples = n;
    fit.enough_samples = n >= options.min_samples;

    for (double q : options.moment_orders) {
        long double s = 0.0L, s2 = 0.0L;
        for (auto r : t) {
            const long double x = std::pow(static_cast<double>(r), q);
            s += x;
            s2 += x * x;
        }
        long double mean = s / dn;
        long double var = n > 1 ? (s2 / dn - mean * mean) * dn / (dn - 1) : 0.0L;
        fit.moments.push_back({q, static_cast<double>(mean), static_cast<double>(std::sqrt(std::max(0.0L, var) / dn))});
    }

    // survival(r) = #{R > r} / n
    auto count_above = [&](double r) {
        return static_cast<double>(t.end() - std::upper_bound(t.begin(), t.end(), static_cast<std::uint64_t>(r)));
    };
    const std::size_t start_idx = static_cast<std::size_t>(std::floor((1.0 - options.start_survival) * dn));
    const std::size_t last_idx = n > options.min_tail_count ? n - options.min_tail_count : 0;
    if (t.front() == t.back()) {
        fit.bounded = true;
        fit.exponent = fit.ci_low = fit.ci_high = std::numeric_limits<double>::infinity();
        return fit;
    }
    if (start_idx >= n || last_idx <= start_idx || t[last_idx] <= t[start_idx])
        throw FitError("return-time tail too short to fit");
    fit.r_lo = static_cast<double>(t[start_idx]);
    fit.r_hi = static_cast<double>(t[last_idx]);
    const double step = std::log(fit.r_hi / fit.r_lo) / static_cast<double>(options.grid_points - 1);
    double prev = -1.0;
    for (std::size_t i = 0; i < options.grid_points; ++i) {
        double r = std::floor(fit.r_lo * std::exp(step * static_cast<double>(i)));
        if (r <= prev) continue;
        prev = r;
        fit.r.push_back(r);
        fit.survival.push_back(count_above(r) / dn);
    }
    auto ef = coupling::exponent_fit(fit.r, fit.survival, {}, options.confidence);
    fit.exponent = -ef.slope;
    double half = (ef.ci_high - ef.ci_low) / 2.0;
    if (!fit.enough_samples) half *= 2.0;
    fit.ci_low = fit.exponent - half;
    fit.ci_high = fit.exponent + half;
    return fit;
}

Verdict lp_verdict(const TailFit& fit, double p) {
    Verdict v;
    v.test = "return-tail-Lp";
    v.statistic = fit.exponent;
    v.ci_low = fit.ci_low;
    v.ci_high = fit.ci_high;
    v.threshold = p;
    if (fit.bounded || (fit.enough_samples && fit.ci_low > p))
        v.status = Status::pass;
    else if (fit.enough_samples && fit.ci_high < p)
        v.status = Status::fail;
    else
        v.status = Status::inconclusive;
    nlohmann::json moments = nlohmann::json::array();
    for (const auto& m : fit.moments) moments.push_back({{"q", m.q}, {"mean", m.mean}, {"stderr", m.stderr_}});
    v.details = {{"samples", fit.samples}, {"bounded", fit.bounded}, {"r_lo", fit.r_lo}, {"r_hi", fit.r_hi},
                 {"moments", moments}, {"claim", "R in L^" + std::to_string(p)}};
    return v;
}

void export_csv(const TailFit& fit, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    out << "r,survival\n";
    for (std::size_t i = 0; i < fit.r.size(); ++i) out << fit.r[i] << ',' << fit.survival[i] << '\n';
}

}  // namespace asiplab::stats
