#pragma once

#include <cstdint>
#include <vector>

#include "asiplab/common/random.hpp"

namespace asiplab::systems {

/// x -> 2x mod 1 on [0, 1).
double doubling_step(double x) noexcept;

/// Doubling-map orbit carried as the next 64 binary digits of x.  Each step
/// shifts one digit out and a fresh fair digit in, which samples Lebesgue
/// measure exactly instead of collapsing to 0 as floating-point iteration does.
struct DoublingState {
    std::uint64_t digits = 0;
    std::uint64_t reserve = 0;   // buffered random digits
    int reserve_left = 0;

    double point() const noexcept { return static_cast<double>(digits) * 0x1.0p-64; }
};

DoublingState doubling_initial(Rng& rng) noexcept;
void doubling_advance(DoublingState& state, Rng& rng) noexcept;

/// Liverani-Saussol-Vaienti intermittent map
///   f(x) = x (1 + 2^gamma x^gamma)  on [0, 1/2),   f(x) = 2x - 1  on [1/2, 1],
/// with neutral fixed point at 0.  The induced (first-return) map lives on
/// Lambda = [1/2, 1].
class LsvModel {
public:
    static constexpr double kInduceLow = 0.5;
    static constexpr double kInduceHigh = 1.0;
    static constexpr std::uint64_t kDefaultReturnCap = 1'000'000'000ULL;

    explicit LsvModel(double gamma);

    double gamma() const noexcept { return gamma_; }
    /// Expansion constant of the induced map (inf of |F'| over Lambda).
    double expansion() const noexcept { return 2.0; }

    double step(double x) const noexcept;
    /// Inverse of the left branch on [0, 1) -> [0, 1/2).
    double left_inverse(double y) const;

private:
    double gamma_;
    double two_pow_gamma_;
};

inline double lsv_step(const LsvModel& model, double x) noexcept { return model.step(x); }

struct InducedReturn {
    double image = 0.0;           ///< F(y) = f^R(y) in Lambda
    std::uint64_t return_time = 0;  ///< R(y) >= 1
};

/// First return of y in [1/2, 1] to [1/2, 1].  Throws InputError outside
/// Lambda and CappedReturn when the orbit has not returned after `cap` steps.
InducedReturn induced_return(const LsvModel& model, double y,
                             std::uint64_t cap = LsvModel::kDefaultReturnCap);

/// Branch partition {Lambda_j} of the induced map.  Entry j-1 holds the
/// interval [lo, hi) on which R = j, for j = 1..max_branch; branch 1 is
/// [3/4, 1].
struct LsvBranch {
    std::uint64_t return_time;
    double lo;
    double hi;
};
std::vector<LsvBranch> lsv_branches(const LsvModel& model, std::uint64_t max_branch);

/// Reference-measure sample on Lambda (normalised Lebesgue on (1/2, 1]).
double lsv_reference_sample(Rng& rng) noexcept;

/// Draw `count` return times from the reference measure on Lambda.
std::vector<std::uint64_t> sample_return_times(const LsvModel& model, std::size_t count, Rng& rng,
                                               std::uint64_t cap = LsvModel::kDefaultReturnCap);

}  // namespace asiplab::systems
