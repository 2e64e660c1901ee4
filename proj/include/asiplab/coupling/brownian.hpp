#pragma once

#include <cstdint>
#include <vector>

#include "asiplab/common/random.hpp"

namespace asiplab::coupling {

/// One-dimensional Brownian motion generated forward in time.  Only the
/// current point is kept; values at the record times k * record_step
/// (k = 1..record_count) are stored as the path passes them.  Each coarse
/// step decides from the bridge crossing probability whether a barrier was
/// hit; the hitting time is then drawn from the bridge's first-passage law
/// (s / (dt - s) is inverse Gaussian), so exits are exact in time.
class BrownianPath {
public:
    BrownianPath(std::uint64_t seed, std::uint64_t record_count = 0, double record_step = 1.0);

    double time() const noexcept { return t_; }
    double value() const noexcept { return w_; }

    /// Run until W leaves (value() + lo, value() + hi), lo < 0 < hi.  On return
    /// value() equals the barrier that was hit exactly; returns the elapsed time.
    double run_to_exit(double lo, double hi);

    /// Plain Brownian increments up to time t >= time().
    void advance_to(double t);

    /// W(k * record_step) for the record times passed so far.
    const std::vector<double>& records() const noexcept { return records_; }
    std::uint64_t record_count() const noexcept { return record_count_; }
    double record_step() const noexcept { return record_step_; }

private:
    /// First hitting time of a barrier at distances d0 (start) and d1 (end)
    /// by a bridge of length dt known to touch it.
    double first_passage(double dt, double d0, double d1);
    double next_record_time() const noexcept;
    void step_to(double t, double w);

    Rng rng_;
    NormalSampler normal_;
    double t_ = 0.0;
    double w_ = 0.0;
    std::uint64_t record_count_;
    double record_step_;
    std::vector<double> records_;
};

}  // namespace asiplab::coupling
