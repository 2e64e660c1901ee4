#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/common/random.hpp"

namespace asiplab::systems {

/// Finite-alphabet one-sided Markov shift with its stationary Markov measure.
///
/// This is the finite-state Gibbs-Markov model: the partition is the set of
/// 1-cylinders, the shift F drops the first symbol, and log g is locally
/// constant (g(a x) = pi_a P(a, x_0) / pi_{x_0}).  `beta` parametrises the
/// symbolic metric d_beta(x, y) = beta^{s(x, y)}.
class MarkovShiftModel {
public:
    /// Throws InputError for a non-stochastic matrix or beta outside (0, 1),
    /// SpectralDegeneracy when no power of the matrix is strictly positive.
    explicit MarkovShiftModel(Eigen::MatrixXd transition, double beta = 0.5);

    /// Full shift on `n` symbols with uniform Bernoulli measure.
    static MarkovShiftModel full_shift(int n, double beta = 0.5);
    /// Symmetric two-state chain that switches symbol with probability `flip`.
    static MarkovShiftModel two_state(double flip, double beta = 0.5);

    int alphabet_size() const noexcept { return static_cast<int>(transition_.rows()); }
    const Eigen::MatrixXd& transition() const noexcept { return transition_; }
    const Eigen::VectorXd& stationary() const noexcept { return stationary_; }
    double beta() const noexcept { return beta_; }

    double transition_prob(int from, int to) const { return transition_(from, to); }

    /// True iff every consecutive pair of the word has positive probability.
    bool admissible(std::span<const int> word) const;
    /// m([w_0 ... w_{k-1}]) under the stationary Markov measure.
    double cylinder_measure(std::span<const int> word) const;

    int sample_stationary(Rng& rng) const;
    /// Draws the successor of `current`; throws InputError on a bad symbol.
    int sample_next(int current, Rng& rng) const;

    /// Modulus of the subleading eigenvalue of the transition matrix.
    double second_eigenvalue_modulus() const;

    /// Recode as the chain on admissible k-words (higher block presentation).
    /// Symbol i of the result is the i-th admissible word in base-n order;
    /// `words` receives the decoded words when non-null.
    MarkovShiftModel higher_block(int k, std::vector<std::vector<int>>* words = nullptr) const;

private:
    Eigen::MatrixXd transition_;
    Eigen::VectorXd stationary_;
    std::vector<double> cumulative_;  // row-major cumulative sums
    std::vector<double> stationary_cumulative_;
    double beta_;
};

/// Rolling fixed-depth window of upcoming symbols xi_n, ..., xi_{n+depth-1}.
class SymbolWindow {
public:
    static constexpr std::size_t kDefaultDepth = 64;

    explicit SymbolWindow(std::size_t depth = kDefaultDepth) : buffer_(depth, 0) {}

    std::size_t depth() const noexcept { return buffer_.size(); }
    /// i-th upcoming symbol, 0 = current.
    int operator[](std::size_t i) const noexcept {
        std::size_t k = head_ + i;
        if (k >= buffer_.size()) k -= buffer_.size();
        return buffer_[k];
    }
    int back() const noexcept { return (*this)[buffer_.size() - 1]; }
    /// Drop the current symbol and append `symbol` at the far end.
    void shift_in(int symbol) noexcept {
        buffer_[head_] = symbol;
        if (++head_ == buffer_.size()) head_ = 0;
    }
    void copy_prefix(std::span<int> out) const noexcept {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i];
    }

private:
    std::vector<int> buffer_;
    std::size_t head_ = 0;
};

/// Fill a window from the stationary chain.
SymbolWindow stationary_window(const MarkovShiftModel& model, Rng& rng,
                               std::size_t depth = SymbolWindow::kDefaultDepth);

/// Advance the shift by one: sample the symbol following the window's last
/// entry, append it and drop the current symbol.  Returns the new symbol.
int shift_step(const MarkovShiftModel& model, SymbolWindow& window, Rng& rng);

struct Separation {
    std::int64_t time = 0;  ///< s(x, y): length of the common prefix
    double distance = 1.0;  ///< beta^s
};

/// Separation time of two symbol sequences (prefix-wise; a fully shared
/// prefix reports its length as a lower bound).
Separation separation_time(const MarkovShiftModel& model, std::span<const int> x,
                           std::span<const int> y);

}  // namespace asiplab::systems
