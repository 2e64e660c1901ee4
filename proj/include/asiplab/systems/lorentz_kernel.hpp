#pragma once

// Scalar-generic billiard geometry.  Instantiated with double for
// simulation and with multiprecision reals for reversibility checks.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace asiplab::systems {

template <class Real>
struct BasicVec2 {
    Real x{};
    Real y{};

    friend BasicVec2 operator+(const BasicVec2& a, const BasicVec2& b) { return {a.x + b.x, a.y + b.y}; }
    friend BasicVec2 operator-(const BasicVec2& a, const BasicVec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend BasicVec2 operator*(const Real& s, const BasicVec2& a) { return {s * a.x, s * a.y}; }
    friend Real dot(const BasicVec2& a, const BasicVec2& b) { return a.x * b.x + a.y * b.y; }
    friend Real norm(const BasicVec2& a) {
        using std::sqrt;
        return sqrt(a.x * a.x + a.y * a.y);
    }
};

template <class Real>
struct BasicCollision {
    BasicVec2<Real> point;     ///< impact point (unfolded plane coordinates)
    Real time{};               ///< free-flight time to the impact
    BasicVec2<Real> velocity;  ///< post-collision velocity
    BasicVec2<Real> normal;    ///< outward unit normal at the impact
    std::size_t scatterer = 0;
    long long cell_i = 0;      ///< lattice translate of the scatterer hit
    long long cell_j = 0;
};

/// Periodic array of disks: translates c_s + i a1 + j a2 of the cell
/// scatterers.  First-hit search walks the ray in chunks and only tests
/// translates whose centre lies within one radius of the current chunk.
template <class Real>
class LorentzGeometry {
public:
    struct Disk {
        BasicVec2<Real> center;
        Real radius;
    };

    LorentzGeometry(BasicVec2<Real> a1, BasicVec2<Real> a2, std::vector<Disk> disks, Real grazing_tolerance)
        : a1_(a1), a2_(a2), disks_(std::move(disks)), grazing_(grazing_tolerance) {
        using std::sqrt;
        const Real det = a1_.x * a2_.y - a2_.x * a1_.y;
        // rows of the inverse lattice matrix
        inv0_ = {a2_.y / det, -a2_.x / det};
        inv1_ = {-a1_.y / det, a1_.x / det};
        for (const auto& d : disks_) {
            lattice_centers_.push_back(to_lattice(d.center));
            if (d.radius > max_radius_) max_radius_ = d.radius;
        }
        const Real l1 = norm(a1_), l2 = norm(a2_);
        chunk_ = l1 > l2 ? l1 : l2;
    }

    BasicVec2<Real> to_lattice(const BasicVec2<Real>& p) const { return {dot(inv0_, p), dot(inv1_, p)}; }
    BasicVec2<Real> translate(long long i, long long j) const {
        return Real(i) * a1_ + Real(j) * a2_;
    }
    const std::vector<Disk>& disks() const noexcept { return disks_; }
    const BasicVec2<Real>& a1() const noexcept { return a1_; }
    const BasicVec2<Real>& a2() const noexcept { return a2_; }

    /// First scatterer boundary met by q + t v, 0 < t <= cutoff.  Grazing
    /// incidences (impact parameter within the tolerance of the radius) are
    /// misses.  Returns nullopt when nothing is hit before the cutoff.
    std::optional<BasicCollision<Real>> first_hit(const BasicVec2<Real>& q, const BasicVec2<Real>& v,
                                                  const Real& cutoff) const {
        using std::ceil;
        using std::floor;
        using std::sqrt;
        Real best = std::numeric_limits<Real>::infinity();
        std::size_t best_s = 0;
        long long best_i = 0, best_j = 0;
        bool found = false;
        Real t0 = 0;
        while (t0 < cutoff) {
            Real t1 = t0 + chunk_;
            if (t1 > cutoff) t1 = cutoff;
            const BasicVec2<Real> s0 = to_lattice(q + t0 * v);
            const BasicVec2<Real> s1 = to_lattice(q + t1 * v);
            const Real lo0 = s0.x < s1.x ? s0.x : s1.x, hi0 = s0.x < s1.x ? s1.x : s0.x;
            const Real lo1 = s0.y < s1.y ? s0.y : s1.y, hi1 = s0.y < s1.y ? s1.y : s0.y;
            for (std::size_t s = 0; s < disks_.size(); ++s) {
                const Real r = disks_[s].radius;
                const Real m0 = r * norm(inv0_), m1 = r * norm(inv1_);
                const auto& c = lattice_centers_[s];
                const auto i_lo = static_cast<long long>(ceil(lo0 - m0 - c.x));
                const auto i_hi = static_cast<long long>(floor(hi0 + m0 - c.x));
                const auto j_lo = static_cast<long long>(ceil(lo1 - m1 - c.y));
                const auto j_hi = static_cast<long long>(floor(hi1 + m1 - c.y));
                for (long long i = i_lo; i <= i_hi; ++i) {
                    for (long long j = j_lo; j <= j_hi; ++j) {
                        const BasicVec2<Real> w = disks_[s].center + translate(i, j) - q;
                        const Real b = dot(w, v);
                        if (!(b > 0)) continue;
                        const Real d2 = dot(w, w) - b * b;
                        const Real d = d2 > 0 ? Real(sqrt(d2)) : Real(0);
                        if (!(d < r - grazing_)) continue;
                        const Real t = b - sqrt(r * r - d * d);
                        if (t > 0 && t < best) {
                            best = t;
                            best_s = s;
                            best_i = i;
                            best_j = j;
                            found = true;
                        }
                    }
                }
            }
            if (found && best <= t1) break;
            t0 = t1;
        }
        if (!found || best > cutoff) return std::nullopt;

        BasicCollision<Real> hit;
        hit.time = best;
        hit.point = q + best * v;
        hit.scatterer = best_s;
        hit.cell_i = best_i;
        hit.cell_j = best_j;
        BasicVec2<Real> n = hit.point - (disks_[best_s].center + translate(best_i, best_j));
        const Real nn = norm(n);
        n = (Real(1) / nn) * n;
        hit.normal = n;
        hit.velocity = v - (Real(2) * dot(v, n)) * n;
        return hit;
    }

    /// True when p lies strictly inside some scatterer translate.
    bool inside_scatterer(const BasicVec2<Real>& p) const {
        using std::ceil;
        using std::floor;
        const BasicVec2<Real> s = to_lattice(p);
        for (std::size_t k = 0; k < disks_.size(); ++k) {
            const Real r = disks_[k].radius;
            const Real m0 = r * norm(inv0_), m1 = r * norm(inv1_);
            const auto& c = lattice_centers_[k];
            for (auto i = static_cast<long long>(ceil(s.x - m0 - c.x)); i <= static_cast<long long>(floor(s.x + m0 - c.x)); ++i) {
                for (auto j = static_cast<long long>(ceil(s.y - m1 - c.y)); j <= static_cast<long long>(floor(s.y + m1 - c.y)); ++j) {
                    const BasicVec2<Real> w = p - (disks_[k].center + translate(i, j));
                    if (dot(w, w) < r * r) return true;
                }
            }
        }
        return false;
    }

private:
    BasicVec2<Real> a1_, a2_, inv0_, inv1_;
    std::vector<Disk> disks_;
    std::vector<BasicVec2<Real>> lattice_centers_;
    Real grazing_;
    Real max_radius_ = 0;
    Real chunk_ = 1;
};

}  // namespace asiplab::systems
