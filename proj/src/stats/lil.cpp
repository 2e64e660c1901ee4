#include "asiplab/stats/lil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"

namespace asiplab::stats {

namespace {

Eigen::MatrixXd inverse_cholesky(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) throw InputError("Sigma must be square");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw InputError("Sigma is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    return L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
}

double whitened_norm(const Eigen::MatrixXd& inv_l, std::span<const double> s) {
    Eigen::Map<const Eigen::VectorXd> v(s.data(), static_cast<Eigen::Index>(s.size()));
    return (inv_l * v).norm();
}

}  // namespace

double lil_normaliser(std::uint64_t n) {
    if (n < 16) throw InputError("log log n is not positive below n = 16");
    double x = static_cast<double>(n);
    return std::sqrt(2.0 * x * std::log(std::log(x)));
}

LilTracker::LilTracker(const Eigen::MatrixXd& sigma, std::uint64_t tail_start)
    : inv_l_(inverse_cholesky(sigma)), sum_(Eigen::VectorXd::Zero(sigma.rows())), tail_start_(tail_start) {
    if (tail_start < 16) throw InputError("LIL tail window must start at n >= 16");
}

void LilTracker::push(std::span<const double> increment) {
    if (static_cast<Eigen::Index>(increment.size()) != sum_.size()) throw InputError("increment dimension mismatch");
    for (Eigen::Index c = 0; c < sum_.size(); ++c) sum_(c) += increment[c];
    ++n_;
    if (n_ >= tail_start_) {
        double a = current();
        if (a > sup_) {
            sup_ = a;
            argsup_ = n_;
        }
    }
}

double LilTracker::current() const {
    double r = 0.0;
    for (Eigen::Index i = 0; i < sum_.size(); ++i) {
        double z = 0.0;
        for (Eigen::Index j = 0; j <= i; ++j) z += inv_l_(i, j) * sum_(j);
        r += z * z;
    }
    return std::sqrt(r) / lil_normaliser(n_);
}

LilResult lil_result(const LilTracker& tracker, double lo, double hi) {
    if (tracker.n() < 10'000) throw InputError("LIL statistic needs N >= 10^4");
    LilResult r{tracker.n(), tracker.tail_start(), tracker.tail_sup(), tracker.argsup(), {}};
    Verdict& v = r.verdict;
    v.test = "lil";
    v.statistic = r.tail_sup;
    v.ci_low = lo;
    v.ci_high = hi;
    v.threshold = 1.0;
    v.status = (r.tail_sup >= lo && r.tail_sup <= hi) ? Status::pass : Status::soft_pass;
    v.details = {{"N", r.N}, {"tail_start", r.tail_start}, {"argsup", r.argsup},
                 {"distance_from_one", std::abs(r.tail_sup - 1.0)}, {"soft", true}};
    if (v.status == Status::soft_pass) v.details["note"] = "outside the window; convergence is O(1/log log N)";
    return r;
}

LilResult iid_normal_lil(std::uint64_t N, int d, std::uint64_t seed, double lo, double hi) {
    if (d < 1) throw InputError("dimension must be positive");
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(N)));
    LilTracker tracker(Eigen::MatrixXd::Identity(d, d), std::max<std::uint64_t>(10'000, root));
    Rng rng(seed);
    NormalSampler normal;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::uint64_t n = 0; n < N; ++n) {
        for (auto& v : x) v = normal(rng);
        tracker.push(x);
    }
    return lil_result(tracker, lo, hi);
}

long double polygon_energy(std::span<const double> values, int dim, std::uint64_t n, std::uint64_t first,
                           std::uint64_t last) {
    if (first > last || last * dim > values.size()) throw InputError("polygon_energy: bad vertex range");
    long double e = 0.0L;
    for (std::uint64_t i = first + 1; i <= last; ++i) {
        for (int c = 0; c < dim; ++c) {
            long double prev = (i == 1) ? 0.0L : values[(i - 2) * dim + c];
            long double delta = values[(i - 1) * dim + c] - prev;
            e += delta * delta;
        }
    }
    return e * static_cast<long double>(n);
}

StrassenDistance strassen_distance(std::span<const double> values, int dim) {
    if (dim < 1 || values.empty() || values.size() % static_cast<std::size_t>(dim) != 0)
        throw InputError("strassen_distance: path is empty or ragged");
    StrassenDistance s;
    s.n = values.size() / static_cast<std::size_t>(dim);
    s.energy = static_cast<double>(polygon_energy(values, dim, s.n, 0, s.n));
    for (std::uint64_t i = 0; i < s.n; ++i) {
        double r = 0.0;
        for (int c = 0; c < dim; ++c) r += values[i * dim + c] * values[i * dim + c];
        s.sup_norm = std::max(s.sup_norm, std::sqrt(r));
    }
    s.distance_bound = s.energy <= 1.0 ? 0.0 : (1.0 - 1.0 / std::sqrt(s.energy)) * s.sup_norm;
    auto at = [&](std::uint64_t i, int c) { return i == 0 ? 0.0 : values[(i - 1) * dim + c]; };
    std::vector<std::uint64_t> idx;
    std::vector<double> g(static_cast<std::size_t>(dim));
    for (std::uint64_t m = 1; m <= std::min<std::uint64_t>(s.n, 1 << 14) && s.distance_bound > 0.0; m *= 2) {
        idx.resize(m + 1);
        for (std::uint64_t k = 0; k <= m; ++k) idx[k] = (k * s.n + m / 2) / m;
        long double energy = 0.0L;
        double g_sup = 0.0, gap = 0.0;
        for (std::uint64_t k = 1; k <= m; ++k) {
            const std::uint64_t a = idx[k - 1], b = idx[k];
            if (b == a) continue;
            for (int c = 0; c < dim; ++c) {
                long double d = at(b, c) - at(a, c);
                energy += d * d * static_cast<long double>(s.n) / static_cast<long double>(b - a);
            }
            for (std::uint64_t i = a + 1; i <= b; ++i) {
                const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
                double r = 0.0, q = 0.0;
                for (int c = 0; c < dim; ++c) {
                    g[c] = (1.0 - w) * at(a, c) + w * at(b, c);
                    r += (at(i, c) - g[c]) * (at(i, c) - g[c]);
                    q += g[c] * g[c];
                }
                gap = std::max(gap, std::sqrt(r));
                g_sup = std::max(g_sup, std::sqrt(q));
            }
        }
        const double e = static_cast<double>(energy);
        const double bound = gap + (e <= 1.0 ? 0.0 : (1.0 - 1.0 / std::sqrt(e)) * g_sup);
        if (bound < s.distance_bound) {
            s.distance_bound = bound;
            s.knots = m;
        }
    }
    return s;
}

StrassenDistance functional_lil(std::span<const double> partial_sums, int dim, std::uint64_t n,
                                const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != dim) throw InputError("Sigma does not match the path dimension");
    if (n < 1000) throw InputError("functional LIL path needs n >= 1000");
    if (partial_sums.size() < n * dim) throw InputError("trajectory shorter than n");
    Eigen::MatrixXd inv_l = inverse_cholesky(sigma);
    const double scale = 1.0 / lil_normaliser(n);
    std::vector<double> f(n * dim);
    for (std::uint64_t i = 0; i < n; ++i) {
        Eigen::Map<const Eigen::VectorXd> s(partial_sums.data() + i * dim, dim);
        Eigen::VectorXd z = inv_l * s * scale;
        for (int c = 0; c < dim; ++c) f[i * dim + c] = z(c);
    }
    return strassen_distance(f, dim);
}

std::vector<double> chung_statistic(std::span<const double> partial_sums, int dim, const Eigen::MatrixXd& sigma,
                                    std::span<const std::uint64_t> checkpoints) {
    Eigen::MatrixXd inv_l = inverse_cholesky(sigma);
    if (inv_l.rows() != dim) throw InputError("Sigma does not match the path dimension");
    const std::uint64_t len = partial_sums.size() / dim;
    std::vector<double> out;
    double running = 0.0;
    std::uint64_t k = 0;
    for (std::uint64_t n : checkpoints) {
        if (n == 0 || n > len) throw InputError("checkpoint beyond the trajectory");
        if (!out.empty() && n <= checkpoints[out.size() - 1]) throw InputError("checkpoints must increase");
        for (; k < n; ++k) running = std::max(running, whitened_norm(inv_l, partial_sums.subspan(k * dim, dim)));
        out.push_back(running / std::sqrt(static_cast<double>(n)));
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InputError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

QuantileSummary summarise_quantiles(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    QuantileSummary s;
    s.q01 = quantile(v, 0.01);
    s.q05 = quantile(v, 0.05);
    s.median = quantile(v, 0.5);
    s.q95 = quantile(v, 0.95);
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return s;
}

std::vector<double> class_integrand(int d, std::span<const double> u, std::span<const double> phi) {
    if (u.size() != phi.size()) throw InputError("class_integrand: u and phi differ in length");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0)) throw InputError("class_integrand: u must be positive");
        out[i] = std::exp(d * std::log(phi[i]) - std::log(u[i]) - 0.5 * phi[i] * phi[i]);
    }
    return out;
}

}  // namespace asiplab::stats
