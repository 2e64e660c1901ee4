#include "asiplab/systems/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "asiplab/common/error.hpp"

namespace asiplab::systems {

namespace {

double det(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

}  // namespace

double LorentzConfig::cell_area() const { return std::abs(det(a1, a2)); }

double LorentzConfig::cell_diameter() const {
    return std::max(norm(a1 + a2), norm(a1 - a2));
}

double LorentzConfig::effective_cutoff() const {
    if (horizon_bound) return 2.0 * *horizon_bound + cell_diameter();
    return search_cutoff;
}

LorentzGeometry<double> LorentzConfig::geometry() const {
    std::vector<LorentzGeometry<double>::Disk> disks;
    disks.reserve(scatterers.size());
    for (const auto& s : scatterers) disks.push_back({s.center, s.radius});
    return LorentzGeometry<double>(a1, a2, std::move(disks), grazing_tolerance);
}

void LorentzConfig::validate() const {
    const double area = cell_area();
    if (!(area > 1e-12)) throw InputError("lorentz config: lattice vectors are degenerate");
    if (!(grazing_tolerance >= 0.0) || !(geometry_tolerance >= 0.0))
        throw InputError("lorentz config: tolerances must be nonnegative");
    if (!(search_cutoff > 0.0)) throw InputError("lorentz config: search_cutoff must be positive");
    if (horizon_bound && !(*horizon_bound > 0.0)) throw InputError("lorentz config: horizon_bound must be positive");

    double disk_area = 0.0;
    for (const auto& s : scatterers) {
        if (!(s.radius > 0.0) || !std::isfinite(s.radius))
            throw InputError("lorentz config: scatterer radius must be positive");
        disk_area += std::numbers::pi * s.radius * s.radius;
    }
    // Disjoint disks in the torus leave a nonempty complement iff their
    // total area is below the cell area.
    if (!(disk_area < area)) throw InputError("lorentz config: scatterers fill the cell");

    const Vec2 inv0{a2.y / det(a1, a2), -a2.x / det(a1, a2)};
    const Vec2 inv1{-a1.y / det(a1, a2), a1.x / det(a1, a2)};
    for (std::size_t s = 0; s < scatterers.size(); ++s) {
        for (std::size_t u = s; u < scatterers.size(); ++u) {
            const double reach = scatterers[s].radius + scatterers[u].radius + geometry_tolerance;
            const Vec2 diff = scatterers[s].center - scatterers[u].center;
            const double l0 = dot(inv0, diff), l1 = dot(inv1, diff);
            const double m0 = reach * norm(inv0), m1 = reach * norm(inv1);
            for (auto i = static_cast<long long>(std::ceil(l0 - m0)); i <= static_cast<long long>(std::floor(l0 + m0)); ++i) {
                for (auto j = static_cast<long long>(std::ceil(l1 - m1)); j <= static_cast<long long>(std::floor(l1 + m1)); ++j) {
                    if (s == u && i == 0 && j == 0) continue;
                    const Vec2 w = diff - (static_cast<double>(i) * a1 + static_cast<double>(j) * a2);
                    if (norm(w) <= reach) {
                        std::ostringstream msg;
                        msg << "lorentz config: scatterers " << s << " and " << u << " (translate " << i << "," << j
                            << ") overlap";
                        throw InputError(msg.str());
                    }
                }
            }
        }
    }
}

Collision next_collision(const LorentzGeometry<double>& geometry, const FlowState& state, double cutoff) {
    auto hit = geometry.first_hit(state.q, state.v, cutoff);
    if (!hit) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "no collision within cutoff " << cutoff << " from q=(" << state.q.x << "," << state.q.y << ") v=("
            << state.v.x << "," << state.v.y << ")";
        throw HorizonViolation(msg.str(), cutoff);
    }
    return *hit;
}

Collision next_collision(const LorentzConfig& config, const FlowState& state, double cutoff) {
    if (cutoff <= 0.0) cutoff = config.effective_cutoff();
    return next_collision(config.geometry(), state, cutoff);
}

Collision collide(const LorentzGeometry<double>& geometry, FlowState& state, double cutoff) {
    Collision c = next_collision(geometry, state, cutoff);
    state.q = c.point;
    state.v = c.velocity;
    state.t += c.time;
    return c;
}

FlowState sample_liouville(const LorentzConfig& config, const LorentzGeometry<double>& geometry, Rng& rng) {
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        const double u1 = uniform01(rng), u2 = uniform01(rng);
        const Vec2 q = u1 * config.a1 + u2 * config.a2;
        if (geometry.inside_scatterer(q)) continue;
        const double angle = 2.0 * std::numbers::pi * uniform01(rng);
        return FlowState{q, Vec2{std::cos(angle), std::sin(angle)}, 0.0};
    }
    throw InputError("lorentz: particle region has negligible area");
}

HorizonReport check_finite_horizon(const LorentzConfig& config, int angular_resolution, double max_flight_cutoff,
                                   int refine_rounds) {
    if (!(max_flight_cutoff > config.cell_diameter()))
        throw InputError("horizon check: cutoff must exceed the cell diameter");
    if (angular_resolution < 4) throw InputError("horizon check: angular_resolution must be at least 4");

    HorizonReport report;
    if (config.scatterers.empty()) {
        report.finite = false;
        report.max_free_flight = std::numeric_limits<double>::infinity();
        return report;
    }
    config.validate();
    const auto geometry = config.geometry();
    constexpr double pi = std::numbers::pi;
    bool escaped = false;

    // For a fixed direction the length of a free segment is convex in the
    // offset of its line between changes of the blocking disks, so the
    // longest one lies on a line tangent to some scatterer.  Each direction
    // therefore traces both tangent lines of every scatterer, from the
    // tangency point forwards and backwards.
    struct Best {
        double flight = -1.0;
        double theta = 0.0;
        Vec2 start, dir;
    };
    auto scan = [&](double theta) {
        Best best;
        best.theta = theta;
        const Vec2 u{std::cos(theta), std::sin(theta)};
        const Vec2 w{-u.y, u.x};
        for (const auto& sc : config.scatterers) {
            for (double side : {-1.0, 1.0}) {
                const Vec2 p = sc.center + (side * sc.radius) * w;
                report.rays += 2;
                const auto fwd = geometry.first_hit(p, u, max_flight_cutoff);
                const auto bwd = geometry.first_hit(p, -1.0 * u, max_flight_cutoff);
                if (!fwd || !bwd) {
                    escaped = true;
                    best.flight = std::numeric_limits<double>::infinity();
                    best.start = p;
                    best.dir = u;
                    return best;
                }
                const double flight = fwd->time + bwd->time;
                if (flight > best.flight) {
                    best.flight = flight;
                    best.start = bwd->point;
                    best.dir = u;
                }
            }
        }
        return best;
    };

    const int n = angular_resolution;
    std::vector<Best> coarse;
    coarse.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n && !escaped; ++k) coarse.push_back(scan(2.0 * pi * k / n));

    Best overall = coarse.front();
    for (const auto& c : coarse)
        if (c.flight > overall.flight) overall = c;

    if (!escaped) {
        const std::size_t keep = std::min<std::size_t>(32, coarse.size());
        std::partial_sort(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(keep), coarse.end(),
                          [](const Best& a, const Best& b) { return a.flight > b.flight; });
        for (std::size_t c = 0; c < keep && !escaped; ++c) {
            Best local = coarse[c];
            double width = 2.0 * pi / n;
            for (int round = 0; round < refine_rounds && !escaped; ++round) {
                const double centre = local.theta;
                for (int a = -4; a <= 4 && !escaped; ++a) {
                    if (a == 0) continue;
                    Best b = scan(centre + width * a / 4.0);
                    if (b.flight > local.flight) local = b;
                }
                width /= 4.0;
            }
            if (local.flight > overall.flight) overall = local;
        }
    }

    report.finite = !escaped;
    report.max_free_flight = escaped ? std::numeric_limits<double>::infinity() : overall.flight;
    report.launch_point = overall.start;
    report.launch_direction = overall.dir;
    return report;
}

}  // namespace asiplab::systems
