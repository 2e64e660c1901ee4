#include "asiplab/simulate/series.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "asiplab/simulate/systems.hpp"

namespace asiplab::simulate {

void PartialSumSeries::validate() const {
    if (dim < 1) throw InputError("series dimension must be positive");
    if (sums.size() != checkpoints.size() * static_cast<std::size_t>(dim))
        throw InputError("series sums do not match checkpoints x dimension");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1]) throw InputError("series checkpoints must increase strictly");
    for (double v : sums)
        if (!std::isfinite(v)) throw InputError("series contains a non-finite sum");
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max, std::uint64_t n_min) {
    if (n_max < 1 || n_min < 1 || n_min > n_max) throw InputError("checkpoint range must satisfy 1 <= n_min <= n_max");
    std::vector<std::uint64_t> out;
    for (int k = 0;; ++k) {
        const double v = std::ceil(std::exp2(k / 4.0) - 1e-9);
        if (v >= static_cast<double>(n_max)) break;
        const auto n = static_cast<std::uint64_t>(v);
        if (n >= n_min && (out.empty() || out.back() != n)) out.push_back(n);
    }
    if (out.empty() || out.back() != n_max) out.push_back(n_max);
    return out;
}

void check_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t n_max) {
    if (checkpoints.empty()) throw InputError("checkpoint grid is empty");
    if (checkpoints.front() < 1 || checkpoints.back() > n_max)
        throw InputError("checkpoints must lie in [1, " + std::to_string(n_max) + "]");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1]) throw InputError("checkpoints must increase strictly");
}

std::string MarkovSystem::descriptor() const {
    std::string s = "markov:" + std::to_string(model_->alphabet_size()) + ":[";
    const auto& p = model_->transition();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", p(i, j));
            s += buf;
            s += (j + 1 < p.cols()) ? "," : (i + 1 < p.rows() ? ";" : "");
        }
    }
    return s + "]";
}

LsvSystem::State LsvSystem::initial(Rng& rng) const {
    double x = uniform01(rng);
    for (std::uint64_t i = 0; i < burn_in_; ++i) x = model_.step(x);
    return x;
}

std::string LsvSystem::descriptor() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "lsv:%.17g:burn_in=%llu", model_.gamma(),
                  static_cast<unsigned long long>(burn_in_));
    return buf;
}

ObservableSpec<systems::SymbolWindow> symbol_observable(const systems::MarkovShiftModel& model,
                                                        std::vector<double> values, std::string name) {
    if (static_cast<int>(values.size()) != model.alphabet_size())
        throw InputError("symbol observable needs one value per symbol");
    double mean = 0.0;
    for (int a = 0; a < model.alphabet_size(); ++a) mean += model.stationary()(a) * values[a];
    ObservableSpec<systems::SymbolWindow> obs;
    obs.evaluator = [values = std::move(values)](const systems::SymbolWindow& w, std::span<double> out) {
        out[0] = values[w[0]];
    };
    obs.centering = {mean};
    obs.holder_exponent = 1.0;
    obs.name = std::move(name);
    return obs;
}

ObservableSpec<systems::SymbolWindow> pm1_observable(const systems::MarkovShiftModel& model) {
    std::vector<double> values(static_cast<std::size_t>(model.alphabet_size()), -1.0);
    values[0] = 1.0;
    return symbol_observable(model, std::move(values), "pm1");
}

ObservableSpec<systems::SymbolWindow> cylinder_observable(const systems::MarkovShiftModel& model, int depth,
                                                          std::vector<double> table, std::string name) {
    const int n = model.alphabet_size();
    if (depth < 1) throw InputError("cylinder observable depth must be positive");
    std::size_t codes = 1;
    for (int i = 0; i < depth; ++i) codes *= static_cast<std::size_t>(n);
    if (table.size() != codes) throw InputError("cylinder observable table has the wrong size");

    double mean = 0.0;
    std::vector<int> word(static_cast<std::size_t>(depth));
    for (std::size_t code = 0; code < codes; ++code) {
        std::size_t c = code;
        for (int i = depth - 1; i >= 0; --i) {
            word[static_cast<std::size_t>(i)] = static_cast<int>(c % n);
            c /= n;
        }
        mean += table[code] * model.cylinder_measure(word);
    }
    ObservableSpec<systems::SymbolWindow> obs;
    obs.evaluator = [table = std::move(table), depth, n](const systems::SymbolWindow& w, std::span<double> out) {
        std::size_t code = 0;
        for (int i = 0; i < depth; ++i) code = code * n + static_cast<std::size_t>(w[i]);
        out[0] = table[code];
    };
    obs.centering = {mean};
    obs.name = std::move(name);
    return obs;
}

ObservableSpec<systems::DoublingState> cos2pi_observable() {
    ObservableSpec<systems::DoublingState> obs;
    obs.evaluator = [](const systems::DoublingState& s, std::span<double> out) {
        out[0] = std::cos(2.0 * std::numbers::pi * s.point());
    };
    obs.centering = {0.0};
    obs.holder_exponent = 1.0;
    obs.name = "cos2pi";
    return obs;
}

ObservableSpec<double> lsv_identity_observable(const LsvSystem& system, std::uint64_t pilot_steps,
                                               std::uint64_t pilot_seed) {
    ObservableSpec<double> obs;
    obs.evaluator = [](const double& x, std::span<double> out) { out[0] = x; };
    obs.centering = {0.0};
    obs.name = "identity";
    obs.centering = pilot_mean(system, obs, pilot_steps, pilot_seed);
    return obs;
}

PartialSumSeries lorentz_position_series(const systems::LorentzConfig& config, double t_max,
                                         std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                                         bool waive_horizon) {
    if (!config.horizon_bound && !waive_horizon)
        throw InputError("lorentz series needs a verified horizon_bound (or an explicit waiver)");
    if (!(t_max >= 0.0)) throw InputError("lorentz series needs t_max >= 0");
    if (checkpoints.empty() || static_cast<double>(checkpoints.back()) > t_max)
        throw InputError("lorentz checkpoints must lie in [0, t_max]");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1]) throw InputError("checkpoints must increase strictly");

    const auto geometry = config.geometry();
    const double cutoff = config.effective_cutoff();
    Rng rng(seed);
    systems::FlowState state = systems::sample_liouville(config, geometry, rng);
    const systems::Vec2 origin = state.q;

    PartialSumSeries out;
    out.dim = 2;
    out.seed = seed;
    out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    out.sums.reserve(2 * checkpoints.size());

    std::uint64_t collisions = 0;
    // Searches never look past t_max, so a flight that outlasts the run is
    // not mistaken for a horizon violation.
    auto upcoming = [&]() -> systems::Collision {
        const double remaining = t_max - state.t;
        if (remaining < cutoff) {
            if (auto h = geometry.first_hit(state.q, state.v, remaining)) return *h;
            systems::Collision none;
            none.time = std::numeric_limits<double>::infinity();
            return none;
        }
        return systems::next_collision(geometry, state, cutoff);
    };
    try {
        auto hit = upcoming();
        for (std::uint64_t target : checkpoints) {
            const double t = static_cast<double>(target);
            while (state.t + hit.time <= t) {
                state.q = hit.point;
                state.v = hit.velocity;
                state.t += hit.time;
                ++collisions;
                hit = upcoming();
            }
            const double rest = t - state.t;
            out.sums.push_back(state.q.x + rest * state.v.x - origin.x);
            out.sums.push_back(state.q.y + rest * state.v.y - origin.y);
        }
    } catch (const std::exception& e) {
        throw TrajectoryError(std::string("lorentz flow: ") + e.what(), 0, collisions);
    }
    return out;
}

}  // namespace asiplab::simulate
