#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/blocking/schedule.hpp"
#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::coupling {

/// Conditional expectations of long-block sums for a symbol observable
/// h(x_0) on a finite stationary Markov chain.
///
/// Positions are 0-based: long block j occupies [s_j, e_j] with
/// s_j = P_{j-1} and e_j = P_{j-1} + [j^Q] - 1.  The filtration L_j is
/// generated by the symbols of long blocks 1..j, so by the Markov property
/// E(. | L_{j-1}) is a function of the symbol at e_{j-1}.
class BlockMartingale {
public:
    /// `h` must be mean zero under the stationary law (InputError otherwise).
    /// K >= 1 is the number of lookahead blocks kept in u_j.
    BlockMartingale(const systems::MarkovShiftModel& model, std::vector<double> h,
                    const blocking::BlockSchedule& schedule, int K);

    int K() const noexcept { return K_; }
    const systems::MarkovShiftModel& model() const noexcept { return model_; }
    const std::vector<double>& h() const noexcept { return h_; }
    /// Blocks available (the schedule's blocks; K further blocks are kept for lookahead).
    std::size_t blocks() const noexcept { return blocks_; }
    std::uint64_t start(std::size_t j) const { return ext_.boundary(j - 1); }
    std::uint64_t end(std::size_t j) const { return ext_.long_end(j) - 1; }

    /// sum_{i=1}^m P^i h, constant once the powers have decayed.
    const Eigen::VectorXd& G(std::uint64_t m) const { return G_[std::min<std::uint64_t>(m, G_.size() - 1)]; }
    /// E(y_j | x_q = .) for q < s_j.
    Eigen::VectorXd block_mean(std::size_t j, std::uint64_t q) const;
    /// u_j as a function of the symbol at e_{j-1}; zero for j = 1.
    Eigen::VectorXd u(std::size_t j) const;
    /// E(Y_j | L_{j-1}) = E(y_{j+K} | L_{j-1}) as a function of the symbol at e_{j-1}.
    Eigen::VectorXd conditional_mean(std::size_t j) const;
    /// max over 2 <= j <= last and all symbols of |E(Y_j | L_{j-1})|.
    double max_conditional_mean(std::size_t last) const;
    /// max_j ||h||_inf rho^{s_{j+K} - e_{j-1}} / (1 - rho) with rho the
    /// subleading eigenvalue modulus, over 2 <= j <= last.
    double tail_bound(std::size_t last) const;

private:
    systems::MarkovShiftModel model_;
    std::vector<double> h_;
    blocking::BlockSchedule ext_;
    std::size_t blocks_;
    int K_;
    std::vector<Eigen::VectorXd> G_;
};

/// Smallest K whose exact conditional means stay below `tolerance` for
/// blocks 2..last; TruncationError carrying the K reached past `max_K`.
int required_lookahead(const systems::MarkovShiftModel& model, const std::vector<double>& h,
                       const blocking::BlockSchedule& schedule, double tolerance, std::size_t last, int max_K = 64);

/// Martingale differences along one symbol path covering blocks 1..M.
struct MartingaleApprox {
    int K = 1;
    std::vector<double> y;  ///< long-block sums, j = 1..M
    std::vector<double> u;  ///< correctors u_1..u_{M+1}
    std::vector<double> Y;  ///< Y_j = y_j - u_j + u_{j+1}
    double reconstruction_error = 0.0;  ///< max_j |y_j - (Y_j + u_j - u_{j+1})|
    double tail_bound = 0.0;
    double max_conditional_mean = 0.0;
};

/// The path must reach e_M for the last block M it is asked to cover.
MartingaleApprox martingale_approx(const BlockMartingale& bm, std::span<const int> symbols, std::size_t M);

}  // namespace asiplab::coupling
