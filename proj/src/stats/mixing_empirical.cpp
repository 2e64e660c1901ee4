#include "asiplab/stats/mixing_empirical.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"
#include "asiplab/transfer/mixing.hpp"

namespace asiplab::stats {

namespace {

struct TrajectoryCounts {
    double a = 0.0, b = 0.0;
    std::vector<double> joint;
};

std::vector<std::uint8_t> match_mask(const std::vector<int>& x, std::span<const int> w, std::size_t count) {
    std::vector<std::uint8_t> m(count, 0);
    for (std::size_t t = 0; t < count; ++t)
        m[t] = std::equal(w.begin(), w.end(), x.begin() + static_cast<std::ptrdiff_t>(t)) ? 1 : 0;
    return m;
}

}  // namespace

EmpiricalMixing mixing_decay_empirical(const systems::MarkovShiftModel& model, std::span<const int> a,
                                       std::span<const int> b, std::span<const std::uint64_t> lags,
                                       const MixingSampling& s) {
    if (a.empty() || b.empty() || lags.empty()) throw InputError("mixing needs nonempty words and lags");
    if (s.trajectories < 2 || s.length == 0) throw InputError("mixing needs at least two trajectories");
    for (int w : a)
        if (w < 0 || w >= model.alphabet_size()) throw InputError("word symbol outside the alphabet");
    for (int w : b)
        if (w < 0 || w >= model.alphabet_size()) throw InputError("word symbol outside the alphabet");
    const std::uint64_t max_lag = *std::max_element(lags.begin(), lags.end());
    const std::size_t ka = a.size(), kb = b.size(), T = s.length;
    const std::size_t total = T + max_lag + ka + kb;

    std::vector<TrajectoryCounts> counts(s.trajectories);
    auto run = [&](std::size_t r) {
        Rng rng(derive_seed(s.master_seed, r));
        std::vector<int> x(total);
        x[0] = model.sample_stationary(rng);
        for (std::size_t t = 1; t < total; ++t) x[t] = model.sample_next(x[t - 1], rng);
        auto ma = match_mask(x, a, T);
        auto mb = match_mask(x, b, total - kb + 1);
        TrajectoryCounts& c = counts[r];
        std::uint64_t na = 0, nb = 0;
        for (std::size_t t = 0; t < T; ++t) {
            na += ma[t];
            nb += mb[t];
        }
        c.a = static_cast<double>(na) / static_cast<double>(T);
        c.b = static_cast<double>(nb) / static_cast<double>(T);
        for (std::uint64_t lag : lags) {
            std::uint64_t j = 0;
            const std::size_t off = lag + ka;
            for (std::size_t t = 0; t < T; ++t) j += ma[t] & mb[t + off];
            c.joint.push_back(static_cast<double>(j) / static_cast<double>(T));
        }
    };
    const unsigned workers = std::max(1u, s.workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < s.trajectories; r += workers) run(r);
            });
    }

    const double K = static_cast<double>(s.trajectories);
    double pa = 0.0, pb = 0.0;
    for (const auto& c : counts) {
        pa += c.a;
        pb += c.b;
    }
    pa /= K;
    pb /= K;

    EmpiricalMixing res;
    std::vector<double> xs, ys, ws;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        MixingLag m;
        m.lag = lags[i];
        double mean = 0.0;
        std::vector<double> d(counts.size());
        for (std::size_t r = 0; r < counts.size(); ++r) {
            // linearised joint - P(A) P(B) per trajectory
            d[r] = counts[r].joint[i] - pa * counts[r].b - pb * counts[r].a + pa * pb;
            mean += counts[r].joint[i];
        }
        m.joint = mean / K;
        m.product = pa * pb;
        m.difference = m.joint - m.product;
        double dm = 0.0;
        for (double v : d) dm += v;
        dm /= K;
        double var = 0.0;
        for (double v : d) var += (v - dm) * (v - dm);
        m.stderr_ = std::sqrt(var / (K - 1.0) / K);
        auto exact = transfer::cylinder_mixing(model, a, b, m.lag);
        m.exact = exact.joint - exact.product;
        m.z = m.stderr_ > 0.0 ? (m.difference - m.exact) / m.stderr_ : (m.difference == m.exact ? 0.0 : INFINITY);
        res.max_abs_z = std::max(res.max_abs_z, std::abs(m.z));
        if (std::abs(m.difference) > 3.0 * m.stderr_ && m.stderr_ > 0.0) {
            xs.push_back(static_cast<double>(m.lag));
            ys.push_back(std::log(std::abs(m.difference)));
            double rel = m.stderr_ / std::abs(m.difference);
            ws.push_back(1.0 / (rel * rel));
        }
        res.lags.push_back(m);
    }

    res.fit_points = xs.size();
    if (xs.size() >= 2) {
        double sw = 0.0, mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sw += ws[i];
            mx += ws[i] * xs[i];
            my += ws[i] * ys[i];
        }
        mx /= sw;
        my /= sw;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
            sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
        }
        if (sxx > 0.0) {
            double slope = sxy / sxx, se = std::sqrt(1.0 / sxx);
            res.tau = std::exp(slope);
            res.tau_ci_low = std::exp(slope - 1.96 * se);
            res.tau_ci_high = std::exp(slope + 1.96 * se);
            res.c = std::exp(my - slope * mx);
        }
    }

    Verdict& v = res.verdict;
    v.test = "mixing";
    v.statistic = res.max_abs_z;
    v.threshold = 3.0;
    v.status = res.max_abs_z <= 3.0 ? Status::pass : Status::fail;
    v.details = {{"tau", res.tau}, {"tau_ci", {res.tau_ci_low, res.tau_ci_high}}, {"C", res.c},
                 {"fit_points", res.fit_points}};
    return res;
}

}  // namespace asiplab::stats
