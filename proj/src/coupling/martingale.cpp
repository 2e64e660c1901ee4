#include "asiplab/coupling/martingale.hpp"

#include <algorithm>
#include <cmath>

#include "asiplab/common/error.hpp"

namespace asiplab::coupling {

namespace {

// Powers P^i h below this relative size are dropped from G.
constexpr double kDecayed = 1e-18;
constexpr std::size_t kMaxPowers = 1'000'000;

}  // namespace

BlockMartingale::BlockMartingale(const systems::MarkovShiftModel& model, std::vector<double> h,
                                 const blocking::BlockSchedule& schedule, int K)
    : model_(model), h_(std::move(h)), ext_(blocking::extend_schedule(schedule, schedule.blocks() + static_cast<std::size_t>(K) + 1)),
      blocks_(schedule.blocks()), K_(K) {
    if (K < 1) throw InputError("lookahead K must be at least 1");
    const int n = model_.alphabet_size();
    if (static_cast<int>(h_.size()) != n) throw InputError("observable needs one value per symbol");
    const Eigen::Map<const Eigen::VectorXd> hv(h_.data(), n);
    const double mean = model_.stationary().dot(hv);
    const double scale = hv.cwiseAbs().maxCoeff();
    if (std::abs(mean) > 1e-12 * std::max(1.0, scale)) throw InputError("observable must be mean zero");

    const Eigen::MatrixXd& P = model_.transition();
    G_.push_back(Eigen::VectorXd::Zero(n));
    Eigen::VectorXd power = hv;
    for (std::size_t i = 1; i < kMaxPowers; ++i) {
        power = P * power;
        G_.push_back(G_.back() + power);
        if (power.cwiseAbs().maxCoeff() <= kDecayed * std::max(scale, 1e-300)) break;
    }
}

Eigen::VectorXd BlockMartingale::block_mean(std::size_t j, std::uint64_t q) const {
    const std::uint64_t s = start(j), e = end(j);
    if (q >= s) throw InputError("conditioning position must precede the block");
    return G(e - q) - G(s - q - 1);
}

Eigen::VectorXd BlockMartingale::u(std::size_t j) const {
    const int n = model_.alphabet_size();
    if (j == 1) return Eigen::VectorXd::Zero(n);
    if (j + static_cast<std::size_t>(K_) - 1 > ext_.blocks()) throw InputError("block index beyond the lookahead range");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    const std::uint64_t q = end(j - 1);
    for (int k = 0; k < K_; ++k) out += block_mean(j + static_cast<std::size_t>(k), q);
    return out;
}

Eigen::VectorXd BlockMartingale::conditional_mean(std::size_t j) const {
    if (j == 1) return Eigen::VectorXd::Zero(model_.alphabet_size());
    return block_mean(j + static_cast<std::size_t>(K_), end(j - 1));
}

double BlockMartingale::max_conditional_mean(std::size_t last) const {
    double worst = 0.0;
    for (std::size_t j = 2; j <= std::min(last, blocks_); ++j)
        worst = std::max(worst, conditional_mean(j).cwiseAbs().maxCoeff());
    return worst;
}

double BlockMartingale::tail_bound(std::size_t last) const {
    const double rho = model_.second_eigenvalue_modulus();
    double hmax = 0.0;
    for (double v : h_) hmax = std::max(hmax, std::abs(v));
    if (rho >= 1.0) return INFINITY;
    double worst = 0.0;
    for (std::size_t j = 2; j <= std::min(last, blocks_); ++j) {
        const auto gap = static_cast<double>(start(j + static_cast<std::size_t>(K_)) - end(j - 1));
        worst = std::max(worst, hmax * std::pow(rho, gap) / (1.0 - rho));
    }
    return worst;
}

int required_lookahead(const systems::MarkovShiftModel& model, const std::vector<double>& h,
                       const blocking::BlockSchedule& schedule, double tolerance, std::size_t last, int max_K) {
    for (int K = 1; K <= max_K; ++K)
        if (BlockMartingale(model, h, schedule, K).max_conditional_mean(last) <= tolerance) return K;
    throw TruncationError("lookahead of " + std::to_string(max_K) + " blocks misses the tolerance", max_K + 1);
}

MartingaleApprox martingale_approx(const BlockMartingale& bm, std::span<const int> symbols, std::size_t M) {
    if (M < 1 || M > bm.blocks()) throw InputError("block count outside the schedule");
    if (symbols.size() <= bm.end(M)) throw InputError("symbol path does not reach the end of block M");
    MartingaleApprox out;
    out.K = bm.K();
    for (std::size_t j = 1; j <= M; ++j) {
        long double y = 0.0L;
        for (std::uint64_t n = bm.start(j); n <= bm.end(j); ++n) y += bm.h()[static_cast<std::size_t>(symbols[n])];
        out.y.push_back(static_cast<double>(y));
    }
    for (std::size_t j = 1; j <= M + 1; ++j) {
        const auto uj = bm.u(j);
        out.u.push_back(j == 1 ? 0.0 : uj(symbols[bm.end(j - 1)]));
    }
    for (std::size_t j = 1; j <= M; ++j) {
        out.Y.push_back(out.y[j - 1] - out.u[j - 1] + out.u[j]);
        out.reconstruction_error =
            std::max(out.reconstruction_error, std::abs(out.y[j - 1] - (out.Y[j - 1] + out.u[j - 1] - out.u[j])));
    }
    out.tail_bound = bm.tail_bound(M);
    out.max_conditional_mean = bm.max_conditional_mean(M);
    return out;
}

}  // namespace asiplab::coupling
