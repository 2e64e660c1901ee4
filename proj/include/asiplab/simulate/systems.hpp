#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "asiplab/simulate/series.hpp"
#include "asiplab/systems/interval_maps.hpp"
#include "asiplab/systems/lorentz.hpp"
#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::simulate {

/// Stationary Markov shift; the state is the window of upcoming symbols.
class MarkovSystem {
public:
    using State = systems::SymbolWindow;

    explicit MarkovSystem(systems::MarkovShiftModel model, std::size_t window_depth = 8)
        : model_(std::make_shared<const systems::MarkovShiftModel>(std::move(model))), depth_(window_depth) {}

    State initial(Rng& rng) const { return systems::stationary_window(*model_, rng, depth_); }
    void advance(State& s, Rng& rng) const { systems::shift_step(*model_, s, rng); }
    std::string descriptor() const;
    const systems::MarkovShiftModel& model() const noexcept { return *model_; }
    std::size_t window_depth() const noexcept { return depth_; }

private:
    std::shared_ptr<const systems::MarkovShiftModel> model_;
    std::size_t depth_;
};

/// Doubling map under Lebesgue measure (exact digit-shift sampling).
class DoublingSystem {
public:
    using State = systems::DoublingState;

    State initial(Rng& rng) const { return systems::doubling_initial(rng); }
    void advance(State& s, Rng& rng) const { systems::doubling_advance(s, rng); }
    std::string descriptor() const { return "doubling"; }
};

/// LSV map started from Lebesgue measure and burned in towards the
/// invariant density.
class LsvSystem {
public:
    using State = double;
    static constexpr std::uint64_t kDefaultBurnIn = 1000;

    explicit LsvSystem(systems::LsvModel model, std::uint64_t burn_in = kDefaultBurnIn)
        : model_(model), burn_in_(burn_in) {}

    State initial(Rng& rng) const;
    void advance(State& x, Rng&) const { x = model_.step(x); }
    std::string descriptor() const;
    const systems::LsvModel& model() const noexcept { return model_; }

private:
    systems::LsvModel model_;
    std::uint64_t burn_in_;
};

/// phi(x) = values[x_0], centred by its exact stationary mean.
ObservableSpec<systems::SymbolWindow> symbol_observable(const systems::MarkovShiftModel& model,
                                                        std::vector<double> values, std::string name);

/// +1 on symbol 0, -1 elsewhere.
ObservableSpec<systems::SymbolWindow> pm1_observable(const systems::MarkovShiftModel& model);

/// Scalar observable constant on depth-k cylinders: table indexed by the
/// base-n code of (x_0, ..., x_{k-1}), exactly centred.
ObservableSpec<systems::SymbolWindow> cylinder_observable(const systems::MarkovShiftModel& model, int depth,
                                                          std::vector<double> table, std::string name);

/// cos(2 pi x) on the doubling map; its Lebesgue mean is exactly zero.
ObservableSpec<systems::DoublingState> cos2pi_observable();

/// Constant observable; its centring removes it entirely.
template <class State>
ObservableSpec<State> constant_observable(double c) {
    ObservableSpec<State> obs;
    obs.evaluator = [c](const State&, std::span<double> out) { out[0] = c; };
    obs.centering = {c};
    obs.name = "constant";
    return obs;
}

/// Pilot estimate of the mean of an uncentred observable along one orbit,
/// used to freeze the centring for systems without an exact mean.
template <SystemModel System>
std::vector<double> pilot_mean(const System& system, const ObservableSpec<typename System::State>& obs,
                               std::uint64_t steps, std::uint64_t seed) {
    Rng rng(seed);
    auto state = system.initial(rng);
    std::vector<long double> acc(static_cast<std::size_t>(obs.dimension), 0.0L);
    std::vector<double> v(acc.size());
    for (std::uint64_t n = 0; n < steps; ++n) {
        obs.evaluator(state, v);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += v[c];
        system.advance(state, rng);
    }
    std::vector<double> mean(acc.size());
    for (std::size_t c = 0; c < acc.size(); ++c) mean[c] = static_cast<double>(acc[c] / static_cast<long double>(steps));
    return mean;
}

/// phi(x) = x on the LSV map, centred by a pilot run (default 1e7 steps).
ObservableSpec<double> lsv_identity_observable(const LsvSystem& system, std::uint64_t pilot_steps = 10'000'000,
                                               std::uint64_t pilot_seed = 0x5eed);

/// Lifted displacement q(T) - q(0) of the billiard flow at the checkpoint
/// times, integrated exactly between collisions.  Requires a verified
/// horizon bound unless `waive_horizon` is set.  Horizon violations are
/// rethrown as TrajectoryError with the collision count.
PartialSumSeries lorentz_position_series(const systems::LorentzConfig& config, double t_max,
                                         std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                                         bool waive_horizon = false);

}  // namespace asiplab::simulate
