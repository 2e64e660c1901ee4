#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace asiplab::stats {

using Rational = boost::rational<std::int64_t>;

/// Moment order of the return time; `infinite` stands for bounded R.
struct MomentOrder {
    Rational value{0};
    bool infinite = false;

    static MomentOrder inf() { return {Rational{0}, true}; }
    static MomentOrder of(Rational p) { return {p, false}; }
    /// Accepts "inf", an integer, or "a/b".
    static MomentOrder parse(std::string_view text);
    std::string str() const;
};

enum class Regime { axiom_a, nonuniform, scalar_improved };

Regime parse_regime(std::string_view name);
const char* regime_name(Regime r) noexcept;

struct ExponentTheorem {
    int d = 1;
    MomentOrder p;
    Regime regime = Regime::nonuniform;
    Rational beta{0};
};

/// Error exponent of the almost sure approximation:
///   axiom-A          (2d+3)/(4d+7), p ignored
///   nonuniform       (1/p + 2d+3)/(4d+7)
///   scalar-improved  1/(2p) + 1/4 for 2 < p <= 4, 3/8 for p >= 4 (d = 1 only)
/// Throws HypothesisError when p <= 2 outside axiom-A, InputError for d < 1
/// or the scalar regime with d > 1.
ExponentTheorem asip_exponent(int d, MomentOrder p, Regime regime);

/// (6d+10)/(12d+21), the nonuniform exponent at p = 3 written out.
Rational billiard_exponent(int d);

std::string to_string(const Rational& r);

}  // namespace asiplab::stats
