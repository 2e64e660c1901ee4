#include "asiplab/systems/markov_shift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "asiplab/common/error.hpp"

namespace asiplab::systems {

namespace {

constexpr double kRowTolerance = 1e-12;

bool is_primitive(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXi pattern = (p.array() > 0.0).cast<int>();
    const long long target = static_cast<long long>(n - 1) * (n - 1) + 1;
    long long power = 1;
    while (power < target) {
        Eigen::MatrixXi sq = pattern * pattern;
        pattern = (sq.array() > 0).cast<int>();
        power *= 2;
    }
    return (pattern.array() > 0).all();
}

Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
    // One power step polishes the residual to machine precision.
    pi = (pi.transpose() * p).transpose();
    return pi / pi.sum();
}

int sample_from_cumulative(const double* cum, int n, double u) {
    for (int i = 0; i < n - 1; ++i) {
        if (u < cum[i]) return i;
    }
    return n - 1;
}

}  // namespace

MarkovShiftModel::MarkovShiftModel(Eigen::MatrixXd transition, double beta)
    : transition_(std::move(transition)), beta_(beta) {
    const Eigen::Index n = transition_.rows();
    if (n < 1 || transition_.cols() != n) {
        throw InputError("transition matrix must be square and non-empty");
    }
    if (!(beta_ > 0.0 && beta_ < 1.0)) {
        throw InputError("metric parameter beta must lie in (0, 1), got " + std::to_string(beta_));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(transition_(i, j) >= 0.0) || !std::isfinite(transition_(i, j))) {
                throw InputError("transition entries must be finite and nonnegative");
            }
        }
        if (std::abs(transition_.row(i).sum() - 1.0) > kRowTolerance) {
            throw InputError("row " + std::to_string(i) + " of the transition matrix does not sum to 1");
        }
    }
    if (!is_primitive(transition_)) {
        throw SpectralDegeneracy("transition matrix is not topologically mixing (no strictly positive power)");
    }
    stationary_ = solve_stationary(transition_);

    cumulative_.resize(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            acc += transition_(i, j);
            cumulative_[static_cast<std::size_t>(i * n + j)] = acc;
        }
    }
    stationary_cumulative_.resize(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        acc += stationary_(j);
        stationary_cumulative_[static_cast<std::size_t>(j)] = acc;
    }
}

MarkovShiftModel MarkovShiftModel::full_shift(int n, double beta) {
    if (n < 1) throw InputError("full shift needs at least one symbol");
    return MarkovShiftModel(Eigen::MatrixXd::Constant(n, n, 1.0 / n), beta);
}

MarkovShiftModel MarkovShiftModel::two_state(double flip, double beta) {
    if (!(flip > 0.0 && flip < 1.0)) throw InputError("flip probability must lie in (0, 1)");
    Eigen::MatrixXd p(2, 2);
    p << 1.0 - flip, flip, flip, 1.0 - flip;
    return MarkovShiftModel(p, beta);
}

bool MarkovShiftModel::admissible(std::span<const int> word) const {
    const int n = alphabet_size();
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] < 0 || word[i] >= n) return false;
        if (i > 0 && transition_(word[i - 1], word[i]) <= 0.0) return false;
    }
    return true;
}

double MarkovShiftModel::cylinder_measure(std::span<const int> word) const {
    if (word.empty()) return 1.0;
    if (!admissible(word)) return 0.0;
    double m = stationary_(word[0]);
    for (std::size_t i = 1; i < word.size(); ++i) m *= transition_(word[i - 1], word[i]);
    return m;
}

int MarkovShiftModel::sample_stationary(Rng& rng) const {
    return sample_from_cumulative(stationary_cumulative_.data(), alphabet_size(), uniform01(rng));
}

int MarkovShiftModel::sample_next(int current, Rng& rng) const {
    const int n = alphabet_size();
    if (current < 0 || current >= n) {
        throw InputError("symbol " + std::to_string(current) + " outside alphabet of size " + std::to_string(n));
    }
    return sample_from_cumulative(cumulative_.data() + static_cast<std::size_t>(current) * n, n,
                                  uniform01(rng));
}

double MarkovShiftModel::second_eigenvalue_modulus() const {
    if (alphabet_size() == 1) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(transition_, false);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) moduli.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    return moduli[1];
}

MarkovShiftModel MarkovShiftModel::higher_block(int k, std::vector<std::vector<int>>* words) const {
    if (k < 1) throw InputError("block length must be positive");
    const int n = alphabet_size();
    std::vector<std::vector<int>> all;
    std::vector<int> w(static_cast<std::size_t>(k), 0);
    // Enumerate in base-n order.
    for (;;) {
        if (admissible(w)) all.push_back(w);
        int pos = k - 1;
        while (pos >= 0 && ++w[static_cast<std::size_t>(pos)] == n) {
            w[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    const auto m = static_cast<Eigen::Index>(all.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto& a = all[static_cast<std::size_t>(i)];
            const auto& b = all[static_cast<std::size_t>(j)];
            if (std::equal(a.begin() + 1, a.end(), b.begin())) p(i, j) = transition_(a.back(), b.back());
        }
    }
    if (words) *words = all;
    return MarkovShiftModel(p, beta_);
}

SymbolWindow stationary_window(const MarkovShiftModel& model, Rng& rng, std::size_t depth) {
    if (depth == 0) throw InputError("symbol window depth must be positive");
    SymbolWindow w(depth);
    int s = model.sample_stationary(rng);
    w.shift_in(s);
    for (std::size_t i = 1; i < depth; ++i) {
        s = model.sample_next(s, rng);
        w.shift_in(s);
    }
    return w;
}

int shift_step(const MarkovShiftModel& model, SymbolWindow& window, Rng& rng) {
    const int next = model.sample_next(window.back(), rng);
    window.shift_in(next);
    return next;
}

Separation separation_time(const MarkovShiftModel& model, std::span<const int> x,
                           std::span<const int> y) {
    const std::size_t len = std::min(x.size(), y.size());
    std::size_t s = 0;
    while (s < len && x[s] == y[s]) ++s;
    return {static_cast<std::int64_t>(s), std::pow(model.beta(), static_cast<double>(s))};
}

}  // namespace asiplab::systems
