#include "asiplab/coupling/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "asiplab/common/error.hpp"

namespace asiplab::coupling {

double DiscreteLaw::mean() const {
    long double m = 0.0L;
    for (std::size_t i = 0; i < atoms.size(); ++i) m += static_cast<long double>(atoms[i]) * probs[i];
    return static_cast<double>(m);
}

double DiscreteLaw::second_moment() const {
    long double m = 0.0L;
    for (std::size_t i = 0; i < atoms.size(); ++i) m += static_cast<long double>(atoms[i]) * atoms[i] * probs[i];
    return static_cast<double>(m);
}

void DiscreteLaw::validate(double mean_tolerance) const {
    if (atoms.empty() || atoms.size() != probs.size()) throw InputError("discrete law needs matching atoms and probs");
    double total = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(probs[i] >= 0.0) || !std::isfinite(atoms[i])) throw InputError("bad atom or probability");
        total += probs[i];
        scale = std::max(scale, std::abs(atoms[i]));
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("probabilities do not sum to one");
    if (std::abs(mean()) > mean_tolerance * std::max(1.0, scale))
        throw InputError("embedded law must have mean zero (mean " + std::to_string(mean()) + ")");
}

DiscreteLaw merge_atoms(std::vector<double> atoms, std::vector<double> probs, double tolerance) {
    if (atoms.size() != probs.size()) throw InputError("atoms and probs differ in length");
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return atoms[i] < atoms[j]; });
    double scale = 0.0;
    for (double a : atoms) scale = std::max(scale, std::abs(a));
    const double tol = tolerance * std::max(1.0, scale);
    DiscreteLaw law;
    for (const auto i : order) {
        if (probs[i] <= 0.0) continue;
        if (!law.atoms.empty() && atoms[i] - law.atoms.back() <= tol) {
            law.probs.back() += probs[i];
        } else {
            law.atoms.push_back(atoms[i]);
            law.probs.push_back(probs[i]);
        }
    }
    return law;
}

namespace {

std::size_t draw(const std::vector<double>& weights, double total, Rng& rng) {
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    // rounding left u just past the end: take the last positive weight
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

}  // namespace

Embedding skorokhod_embed(const DiscreteLaw& law, BrownianPath& path, Rng& rng) {
    const std::size_t n = law.atoms.size();
    double scale = 0.0;
    for (double a : law.atoms) scale = std::max(scale, std::abs(a));
    const double zero_tol = 1e-15 * std::max(1.0, scale);
    double m_neg = 0.0, m_pos = 0.0, m_zero = 0.0;
    std::size_t zero_atom = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (law.atoms[i] < -zero_tol) m_neg += law.probs[i];
        else if (law.atoms[i] > zero_tol) m_pos += law.probs[i];
        else {
            m_zero += law.probs[i];
            zero_atom = i;
        }
    }
    if (m_neg == 0.0 || m_pos == 0.0) {
        // a mean-zero law without both signs is the point mass at zero
        if (zero_atom == n) throw InputError("embedded law has no atom at zero and only one sign");
        return {law.atoms[zero_atom], 0.0, zero_atom};
    }
    if (zero_atom != n && uniform01(rng) < m_zero) return {law.atoms[zero_atom], 0.0, zero_atom};

    // (v - u) mu(u) mu(v) = v mu(v) mu(u) + (-u) mu(u) mu(v): a two-part mixture
    std::vector<double> wu(n, 0.0), wv(n, 0.0);
    const bool size_biased_v = uniform01(rng) * (m_neg + m_pos) < m_neg;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = law.atoms[i];
        if (a < -zero_tol) wu[i] = size_biased_v ? law.probs[i] : -a * law.probs[i];
        else if (a > zero_tol) wv[i] = size_biased_v ? a * law.probs[i] : law.probs[i];
    }
    const auto iu = draw(wu, std::accumulate(wu.begin(), wu.end(), 0.0), rng);
    const auto iv = draw(wv, std::accumulate(wv.begin(), wv.end(), 0.0), rng);
    const double start = path.value();
    const double tau = path.run_to_exit(law.atoms[iu], law.atoms[iv]);
    const bool upper = path.value() - start > 0.0;
    return {upper ? law.atoms[iv] : law.atoms[iu], tau, upper ? iv : iu};
}

double chi_square_pvalue(const DiscreteLaw& law, const std::vector<std::size_t>& counts) {
    if (counts.size() != law.atoms.size()) throw InputError("counts do not match the law");
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total <= 0.0) throw InputError("no observations");
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (law.probs[i] <= 0.0) continue;
        const double e = total * law.probs[i];
        stat += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
        ++cells;
    }
    if (cells < 2) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(cells - 1)), stat));
}

}  // namespace asiplab::coupling
