#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asiplab/common/random.hpp"
#include "asiplab/systems/lorentz_kernel.hpp"

namespace asiplab::systems {

using Vec2 = BasicVec2<double>;

struct Scatterer {
    Vec2 center;
    double radius = 0.0;
};

/// Periodic planar billiard table.  Plain-text format, one directive per
/// line, '#' starts a comment:
///
///     lattice <a1x> <a1y> <a2x> <a2y>
///     scatterer <cx> <cy> <radius>        (repeatable)
///     horizon_bound <length>              (optional)
///     search_cutoff <length>              (default 50)
///     grazing_tolerance <eps>             (default 1e-12)
///     geometry_tolerance <eps>            (default 1e-9)
struct LorentzConfig {
    Vec2 a1{1.0, 0.0};
    Vec2 a2{0.0, 1.0};
    std::vector<Scatterer> scatterers;
    std::optional<double> horizon_bound;
    double search_cutoff = 50.0;
    double grazing_tolerance = 1e-12;
    double geometry_tolerance = 1e-9;

    /// Throws InputError on overlapping scatterers, nonpositive radii, a
    /// degenerate lattice or an empty particle region.
    void validate() const;
    double cell_area() const;
    double cell_diameter() const;
    /// Cutoff used by next_collision: a margin above the verified horizon
    /// bound when one is set, otherwise search_cutoff.
    double effective_cutoff() const;
    LorentzGeometry<double> geometry() const;
};

LorentzConfig parse_lorentz_config(std::istream& in);
LorentzConfig load_lorentz_config(const std::filesystem::path& path);
std::string format_lorentz_config(const LorentzConfig& config);

struct FlowState {
    Vec2 q;
    Vec2 v;
    double t = 0.0;
};

using Collision = BasicCollision<double>;

/// First collision of the free flight from `state`.  A cutoff <= 0 means
/// config.effective_cutoff().  Throws HorizonViolation when no scatterer is
/// met before the cutoff.
Collision next_collision(const LorentzConfig& config, const FlowState& state, double cutoff = 0.0);
Collision next_collision(const LorentzGeometry<double>& geometry, const FlowState& state, double cutoff);

/// Advance the flow through one collision: moves q to the impact point,
/// replaces v with the reflected velocity and adds the flight time to t.
Collision collide(const LorentzGeometry<double>& geometry, FlowState& state, double cutoff);

/// Liouville-distributed initial condition: q uniform in the cell minus
/// the scatterers, v uniform on the circle.
FlowState sample_liouville(const LorentzConfig& config, const LorentzGeometry<double>& geometry, Rng& rng);

struct HorizonReport {
    bool finite = false;
    double max_free_flight = 0.0;  ///< longest flight seen (lower bound on the supremum)
    Vec2 launch_point;
    Vec2 launch_direction;
    std::uint64_t rays = 0;
};

/// Scans `angular_resolution` equally spaced flight directions.  For each
/// one, every scatterer boundary point where the direction is tangent is
/// traced forwards and backwards; the longest flights are then refined in
/// angle.  The result is a lower bound on the true supremum.
/// Throws InputError if the cutoff does not exceed the cell diameter.
HorizonReport check_finite_horizon(const LorentzConfig& config, int angular_resolution, double max_flight_cutoff,
                                   int refine_rounds = 8);

}  // namespace asiplab::systems
