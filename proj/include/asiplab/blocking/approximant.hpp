#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asiplab/blocking/schedule.hpp"
#include "asiplab/systems/markov_shift.hpp"
#include "asiplab/transfer/cylinder.hpp"

namespace asiplab::blocking {

/// Lookup tables for E(phi | x_0, ..., x_l), l = 0..max_level, indexed by the
/// base-n code of the first l+1 symbols.  Inadmissible prefixes hold 0.
class ConditionalTable {
public:
    /// Deepest symbolic window a table may condition on.
    static constexpr int kMaxWindow = 24;

    /// Tables for a cylinder function `f` on `space` (any depth).  Levels at or
    /// beyond depth-1 reproduce f itself.  Throws WindowError when
    /// max_level + 1 exceeds `window` or kMaxWindow.
    ConditionalTable(const transfer::CylinderSpace& space, const transfer::CylinderFunction& f, int max_level,
                     int window = kMaxWindow);

    /// cos(2 pi x) on the doubling map conditioned on the first l+1 binary digits.
    static ConditionalTable dyadic_cos2pi(int max_level);

    int max_level() const noexcept { return static_cast<int>(levels_.size()) - 1; }
    int dim() const noexcept { return dim_; }
    int alphabet() const noexcept { return n_; }

    /// Value at `level` for a prefix code; WindowError when the level is too deep.
    std::span<const double> value(int level, std::uint64_t prefix_code) const;
    /// Same, reading the prefix from a symbol window.
    std::span<const double> value(int level, const systems::SymbolWindow& window) const;

private:
    ConditionalTable() = default;
    int dim_ = 1;
    int n_ = 2;
    std::vector<std::vector<double>> levels_;  // levels_[l][code * dim + c]
};

/// eta_n and its conditional approximant eta_{l(n), n} along one orbit,
/// n = 1..size(), row-major with `dim` columns.
struct ApproximantSeries {
    int dim = 1;
    std::vector<double> eta;
    std::vector<double> eta_l;

    std::size_t size() const noexcept { return eta.size() / static_cast<std::size_t>(dim); }
};

/// Stationary Markov orbit of length `length` for the (exactly centred)
/// cylinder observable `f`, with conditioning depth taken from the schedule.
ApproximantSeries markov_approximant_series(const transfer::CylinderSpace& space, const transfer::CylinderFunction& f,
                                            const BlockSchedule& schedule, std::uint64_t length, std::uint64_t seed);

/// cos(2 pi x) along a Lebesgue-distributed doubling orbit.
ApproximantSeries doubling_approximant_series(const BlockSchedule& schedule, std::uint64_t length,
                                              std::uint64_t seed);

/// Root-mean-square |eta - eta_l| of cos(2 pi x) on the doubling map for
/// l = 0..max_level, estimated from `samples` Lebesgue points.
std::vector<double> doubling_approximant_errors(int max_level, std::uint64_t samples, std::uint64_t seed);

}  // namespace asiplab::blocking
