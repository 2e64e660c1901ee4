#include "asiplab/blocking/approximant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asiplab/common/error.hpp"
#include "asiplab/systems/interval_maps.hpp"

namespace asiplab::blocking {

namespace {

void check_level(int level, int max_window) {
    if (level < 0) throw InputError("conditioning level must be non-negative");
    if (level + 1 > max_window)
        throw WindowError("conditioning level " + std::to_string(level) + " needs " + std::to_string(level + 1) +
                          " symbols, window holds " + std::to_string(max_window));
}

// Dense table by word code; inadmissible codes stay 0.
std::vector<double> by_code(const transfer::CylinderSpace& space, const transfer::CylinderFunction& f) {
    std::uint64_t total = 1;
    for (int i = 0; i < space.depth(); ++i) total *= static_cast<std::uint64_t>(space.alphabet());
    std::vector<double> out(total * static_cast<std::size_t>(f.dim), 0.0);
    for (std::size_t i = 0; i < space.size(); ++i)
        for (int c = 0; c < f.dim; ++c) out[space.code(i) * static_cast<std::size_t>(f.dim) + c] = f(i, c);
    return out;
}

}  // namespace

ConditionalTable::ConditionalTable(const transfer::CylinderSpace& space, const transfer::CylinderFunction& f,
                                   int max_level, int window)
    : dim_(f.dim), n_(space.alphabet()) {
    check_level(max_level, std::min(window, kMaxWindow));
    if (f.depth != space.depth() || f.values.size() != space.size() * static_cast<std::size_t>(f.dim))
        throw InputError("cylinder function does not match its space");
    const int fine_depth = std::max(space.depth(), max_level + 1);
    const transfer::CylinderSpace fine(space.model(), fine_depth);
    const auto lifted = fine_depth == space.depth() ? f : transfer::lift(space, f, fine);
    levels_.reserve(static_cast<std::size_t>(max_level) + 1);
    for (int l = 0; l <= max_level; ++l) {
        if (l + 1 == fine_depth) {
            levels_.push_back(by_code(fine, lifted));
        } else {
            const transfer::CylinderSpace coarse(space.model(), l + 1);
            levels_.push_back(by_code(coarse, transfer::condition_on_prefix(fine, lifted, coarse)));
        }
    }
}

ConditionalTable ConditionalTable::dyadic_cos2pi(int max_level) {
    check_level(max_level, kMaxWindow);
    ConditionalTable t;
    t.dim_ = 1;
    t.n_ = 2;
    const auto model = systems::MarkovShiftModel::full_shift(2);
    for (int l = 0; l <= max_level; ++l) {
        const transfer::CylinderSpace space(model, l + 1);
        t.levels_.push_back(by_code(space, transfer::dyadic_cos2pi(space)));
    }
    return t;
}

std::span<const double> ConditionalTable::value(int level, std::uint64_t prefix_code) const {
    check_level(level, max_level() + 1);
    const auto& table = levels_[static_cast<std::size_t>(level)];
    const auto at = prefix_code * static_cast<std::size_t>(dim_);
    if (at >= table.size()) throw InputError("prefix code out of range");
    return {table.data() + at, static_cast<std::size_t>(dim_)};
}

std::span<const double> ConditionalTable::value(int level, const systems::SymbolWindow& window) const {
    if (static_cast<std::size_t>(level) + 1 > window.depth())
        throw WindowError("conditioning level " + std::to_string(level) + " exceeds the symbol window");
    std::uint64_t code = 0;
    for (int i = 0; i <= level; ++i) code = code * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(window[i]);
    return value(level, code);
}

ApproximantSeries markov_approximant_series(const transfer::CylinderSpace& space, const transfer::CylinderFunction& f,
                                            const BlockSchedule& schedule, std::uint64_t length, std::uint64_t seed) {
    if (length == 0 || length > schedule.boundary(schedule.blocks()))
        throw InputError("series length outside the schedule");
    const auto centred = transfer::centred(space, f);
    const int top = schedule.depth_at(length);
    const ConditionalTable table(space, centred, top);
    const std::size_t depth = static_cast<std::size_t>(std::max(space.depth(), top + 1));
    const auto& model = space.model();

    Rng rng(seed);
    auto window = systems::stationary_window(model, rng, depth);
    ApproximantSeries out;
    out.dim = f.dim;
    out.eta.reserve(length * static_cast<std::size_t>(f.dim));
    out.eta_l.reserve(out.eta.capacity());
    const auto n_sym = static_cast<std::uint64_t>(model.alphabet_size());
    for (std::uint64_t n = 1; n <= length; ++n) {
        std::uint64_t code = 0;
        for (int i = 0; i < space.depth(); ++i) code = code * n_sym + static_cast<std::uint64_t>(window[i]);
        const auto idx = static_cast<std::size_t>(space.index_of_code(code));
        for (int c = 0; c < f.dim; ++c) out.eta.push_back(centred(idx, c));
        const auto approx = table.value(schedule.depth_at(n), window);
        out.eta_l.insert(out.eta_l.end(), approx.begin(), approx.end());
        systems::shift_step(model, window, rng);
    }
    return out;
}

ApproximantSeries doubling_approximant_series(const BlockSchedule& schedule, std::uint64_t length,
                                              std::uint64_t seed) {
    if (length == 0 || length > schedule.boundary(schedule.blocks()))
        throw InputError("series length outside the schedule");
    const auto table = ConditionalTable::dyadic_cos2pi(schedule.depth_at(length));
    Rng rng(seed);
    auto state = systems::doubling_initial(rng);
    ApproximantSeries out;
    out.eta.reserve(length);
    out.eta_l.reserve(length);
    for (std::uint64_t n = 1; n <= length; ++n) {
        out.eta.push_back(std::cos(2.0 * std::numbers::pi * state.point()));
        const int l = schedule.depth_at(n);
        out.eta_l.push_back(table.value(l, state.digits >> (63 - l))[0]);
        systems::doubling_advance(state, rng);
    }
    return out;
}

std::vector<double> doubling_approximant_errors(int max_level, std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw InputError("need at least one sample");
    const auto table = ConditionalTable::dyadic_cos2pi(max_level);
    std::vector<long double> acc(static_cast<std::size_t>(max_level) + 1, 0.0L);
    Rng rng(seed);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto state = systems::doubling_initial(rng);
        const double eta = std::cos(2.0 * std::numbers::pi * state.point());
        for (int l = 0; l <= max_level; ++l) {
            const double d = eta - table.value(l, state.digits >> (63 - l))[0];
            acc[static_cast<std::size_t>(l)] += static_cast<long double>(d) * d;
        }
    }
    std::vector<double> out(acc.size());
    for (std::size_t l = 0; l < acc.size(); ++l)
        out[l] = std::sqrt(static_cast<double>(acc[l] / static_cast<long double>(samples)));
    return out;
}

}  // namespace asiplab::blocking
