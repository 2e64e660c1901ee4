#include "asiplab/coupling/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asiplab/common/error.hpp"

namespace asiplab::coupling {

namespace {

// Crossing probabilities of a Brownian bridge from x0 to x1 over time dt.
// Touching both barriers in one step needs a swing of the full width and is
// ignored; an endpoint outside makes the crossing certain.
struct Crossing {
    double a = 0.0;
    double b = 0.0;
};

double touch(double d0, double d1, double dt) {
    const double e = -2.0 * d0 * d1 / dt;
    return e < -60.0 ? 0.0 : std::exp(e);
}

Crossing crossing(double dt, double x0, double x1, double a, double b) {
    if (x1 <= a) return {1.0, 0.0};
    if (x1 >= b) return {0.0, 1.0};
    return {touch(x0 - a, x1 - a, dt), touch(b - x0, b - x1, dt)};
}

}  // namespace

BrownianPath::BrownianPath(std::uint64_t seed, std::uint64_t record_count, double record_step)
    : rng_(seed), record_count_(record_count), record_step_(record_step) {
    if (!(record_step > 0.0)) throw InputError("record step must be positive");
    records_.reserve(record_count);
}

double BrownianPath::next_record_time() const noexcept {
    if (records_.size() >= record_count_) return std::numeric_limits<double>::infinity();
    return static_cast<double>(records_.size() + 1) * record_step_;
}

void BrownianPath::step_to(double t, double w) {
    t_ = t;
    w_ = w;
    if (t_ == next_record_time()) records_.push_back(w_);
}

void BrownianPath::advance_to(double t) {
    if (t < t_) throw InputError("Brownian path cannot move backwards in time");
    while (t_ < t) {
        const double target = std::min(t, next_record_time());
        step_to(target, w_ + std::sqrt(target - t_) * normal_(rng_));
    }
}

double BrownianPath::first_passage(double dt, double d0, double d1) {
    // s = dt r / (1 + r) with r ~ IG(mu = d0 / d1, lambda = d0^2 / dt)
    const double lambda = d0 * d0 / dt;
    const double nu = normal_(rng_);
    const double y = nu * nu;
    double r;
    if (d1 <= d0 * 1e-12) {
        r = lambda / std::max(y, 1e-300);  // mu -> infinity: Levy limit
    } else {
        // Michael-Schucany-Haas
        const double mu = d0 / d1;
        const double x = mu + mu * mu * y / (2.0 * lambda) -
                         mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
        r = uniform01(rng_) * (mu + x) <= mu ? x : mu * mu / x;
    }
    return dt * r / (1.0 + r);
}

double BrownianPath::run_to_exit(double lo, double hi) {
    if (!(lo < 0.0 && hi > 0.0)) throw InputError("exit interval must contain the current value");
    const double a = w_ + lo, b = w_ + hi;
    const double start = t_;
    const double coarse = 0.0625 * (hi - lo) * (hi - lo);
    for (;;) {
        const double t1 = std::min(t_ + coarse, next_record_time());
        const double x1 = w_ + std::sqrt(t1 - t_) * normal_(rng_);
        const auto c = crossing(t1 - t_, w_, x1, a, b);
        const double u = uniform01(rng_);
        if (u < c.a + c.b) {
            const bool lower = u < c.a;
            const double level = lower ? a : b;
            // the exit precedes t1, so no record time was crossed
            t_ += first_passage(t1 - t_, std::abs(w_ - level), std::abs(x1 - level));
            w_ = level;
            return t_ - start;
        }
        step_to(t1, x1);
    }
}

}  // namespace asiplab::coupling
