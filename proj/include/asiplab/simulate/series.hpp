#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"

namespace asiplab::simulate {

/// Partial sums S_N of a d-dimensional observable at increasing times N.
struct PartialSumSeries {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> sums;  // row-major, checkpoints.size() x dim
    int dim = 1;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return checkpoints.size(); }
    std::span<const double> at(std::size_t i) const {
        return {sums.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    double at(std::size_t i, int c) const { return sums[i * static_cast<std::size_t>(dim) + c]; }
    /// Throws InputError unless checkpoints increase strictly and sums are finite.
    void validate() const;
    bool operator==(const PartialSumSeries&) const = default;
};

/// Log-uniform grid ceil(2^{k/4}) restricted to [n_min, n_max], duplicates
/// removed, with n_max always included.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t n_max, std::uint64_t n_min = 1);

/// Throws InputError unless the grid increases strictly inside [1, n_max].
void check_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t n_max);

/// A discrete-time system sampled along seeded orbits.
template <class S>
concept SystemModel = requires(const S& sys, typename S::State& state, Rng& rng) {
    { sys.initial(rng) } -> std::same_as<typename S::State>;
    sys.advance(state, rng);
    { sys.descriptor() } -> std::convertible_to<std::string>;
};

/// Vector observable on the states of a system; `centering` is subtracted
/// from every evaluation.
template <class State>
struct ObservableSpec {
    int dimension = 1;
    std::function<void(const State&, std::span<double>)> evaluator;
    std::vector<double> centering;
    double holder_exponent = 1.0;
    std::string name;

    void evaluate_centered(const State& s, std::span<double> out) const {
        evaluator(s, out);
        for (int c = 0; c < dimension; ++c) out[c] -= centering[c];
    }
};

/// Partial sums S_N = phi(x_0) + ... + phi(x_{N-1}) of the centred observable
/// along the orbit started from system.initial(Rng(seed)), recorded at the
/// checkpoints.  Failures inside the system are rethrown as TrajectoryError
/// carrying the step count.
template <SystemModel System>
PartialSumSeries birkhoff_series(const System& system, const ObservableSpec<typename System::State>& obs,
                                 std::uint64_t n_max, std::span<const std::uint64_t> checkpoints,
                                 std::uint64_t seed) {
    check_checkpoints(checkpoints, n_max);
    if (obs.dimension < 1 || static_cast<int>(obs.centering.size()) != obs.dimension)
        throw InputError("observable dimension and centering size disagree");
    PartialSumSeries out;
    out.dim = obs.dimension;
    out.seed = seed;
    out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    out.sums.reserve(checkpoints.size() * static_cast<std::size_t>(obs.dimension));

    Rng rng(seed);
    std::vector<double> acc(static_cast<std::size_t>(obs.dimension), 0.0);
    std::vector<double> value(acc.size());
    std::uint64_t n = 0;
    try {
        auto state = system.initial(rng);
        std::size_t next = 0;
        for (n = 0; n < n_max && next < checkpoints.size(); ++n) {
            obs.evaluate_centered(state, value);
            for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += value[c];
            if (n + 1 == checkpoints[next]) {
                out.sums.insert(out.sums.end(), acc.begin(), acc.end());
                ++next;
            }
            system.advance(state, rng);
        }
    } catch (const TrajectoryError&) {
        throw;
    } catch (const std::exception& e) {
        throw TrajectoryError(std::string(system.descriptor()) + ": " + e.what(), 0, n);
    }
    return out;
}

}  // namespace asiplab::simulate
