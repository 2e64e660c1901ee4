#include "asiplab/systems/interval_maps.hpp"

#include <cmath>
#include <string>

#include "asiplab/common/error.hpp"

namespace asiplab::systems {

double doubling_step(double x) noexcept {
    const double y = 2.0 * x;
    return y >= 1.0 ? y - 1.0 : y;
}

DoublingState doubling_initial(Rng& rng) noexcept {
    DoublingState s;
    s.digits = rng();
    return s;
}

void doubling_advance(DoublingState& state, Rng& rng) noexcept {
    if (state.reserve_left == 0) {
        state.reserve = rng();
        state.reserve_left = 64;
    }
    state.digits = (state.digits << 1) | (state.reserve & 1ULL);
    state.reserve >>= 1;
    --state.reserve_left;
}

LsvModel::LsvModel(double gamma) : gamma_(gamma), two_pow_gamma_(std::pow(2.0, gamma)) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw InputError("LSV intermittency exponent must lie in (0, 1), got " + std::to_string(gamma));
    }
}

double LsvModel::step(double x) const noexcept {
    if (x < 0.5) return x * (1.0 + two_pow_gamma_ * std::pow(x, gamma_));
    return 2.0 * x - 1.0;
}

double LsvModel::left_inverse(double y) const {
    if (!(y >= 0.0 && y < 1.0)) throw InputError("left-branch inverse needs y in [0, 1)");
    if (y == 0.0) return 0.0;
    // Newton from above is monotone for this convex branch; bisection guards it.
    double lo = 0.0, hi = std::min(0.5, y);
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        const double fx = x * (1.0 + two_pow_gamma_ * std::pow(x, gamma_)) - y;
        if (fx > 0.0) hi = x; else lo = x;
        const double dfx = 1.0 + (1.0 + gamma_) * two_pow_gamma_ * std::pow(x, gamma_);
        double nx = x - fx / dfx;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 1e-17 * std::max(x, 1e-300)) return nx;
        x = nx;
    }
    return x;
}

InducedReturn induced_return(const LsvModel& model, double y, std::uint64_t cap) {
    if (!(y >= LsvModel::kInduceLow && y <= LsvModel::kInduceHigh)) {
        throw InputError("induced return needs y in [1/2, 1]");
    }
    double x = model.step(y);
    std::uint64_t r = 1;
    while (x < LsvModel::kInduceLow) {
        if (r >= cap) {
            throw CappedReturn("LSV orbit did not return to [1/2, 1] within " + std::to_string(cap) + " steps",
                               cap);
        }
        x = model.step(x);
        ++r;
    }
    return {x, r};
}

std::vector<LsvBranch> lsv_branches(const LsvModel& model, std::uint64_t max_branch) {
    // z = 2y - 1 in [a_k, a_{k-1}) returns after k+1 steps, where a_0 = 1/2 and
    // a_k is the k-fold left-branch preimage of 1/2.
    std::vector<LsvBranch> out;
    out.reserve(max_branch);
    out.push_back({1, 0.75, 1.0});
    double upper = 0.5;
    for (std::uint64_t j = 2; j <= max_branch; ++j) {
        const double lower = model.left_inverse(upper);
        out.push_back({j, 0.5 * (1.0 + lower), 0.5 * (1.0 + upper)});
        upper = lower;
    }
    return out;
}

double lsv_reference_sample(Rng& rng) noexcept { return 0.5 + 0.5 * uniform01_open_low(rng); }

std::vector<std::uint64_t> sample_return_times(const LsvModel& model, std::size_t count, Rng& rng,
                                               std::uint64_t cap) {
    std::vector<std::uint64_t> out(count);
    for (auto& r : out) r = induced_return(model, lsv_reference_sample(rng), cap).return_time;
    return out;
}

}  // namespace asiplab::systems
