#include "asiplab/stats/exponent.hpp"

#include <charconv>

#include "asiplab/common/error.hpp"

namespace asiplab::stats {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw InputError("moment order '" + std::string(whole) + "' is not inf, an integer or a/b");
    return v;
}

}  // namespace

MomentOrder MomentOrder::parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return inf();
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return of(Rational{parse_int(text, text)});
    std::int64_t den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw InputError("moment order has zero denominator");
    return of(Rational{parse_int(text.substr(0, slash), text), den});
}

std::string MomentOrder::str() const { return infinite ? "inf" : to_string(value); }

Regime parse_regime(std::string_view name) {
    if (name == "axiom-A" || name == "axiom-a" || name == "axiomA") return Regime::axiom_a;
    if (name == "nonuniform") return Regime::nonuniform;
    if (name == "scalar-improved" || name == "scalar") return Regime::scalar_improved;
    throw InputError("unknown regime '" + std::string(name) + "' (axiom-A, nonuniform, scalar-improved)");
}

const char* regime_name(Regime r) noexcept {
    switch (r) {
        case Regime::axiom_a: return "axiom-A";
        case Regime::nonuniform: return "nonuniform";
        case Regime::scalar_improved: return "scalar-improved";
    }
    return "?";
}

ExponentTheorem asip_exponent(int d, MomentOrder p, Regime regime) {
    if (d < 1) throw InputError("dimension d must be at least 1");
    ExponentTheorem t{d, p, regime, Rational{0}};
    const std::int64_t dd = d;
    if (regime == Regime::axiom_a) {
        t.beta = Rational{2 * dd + 3, 4 * dd + 7};
        return t;
    }
    if (!p.infinite && p.value <= 2) throw HypothesisError("return time must lie in L^p with p > 2, got p = " + p.str());
    Rational inv_p = p.infinite ? Rational{0} : 1 / p.value;
    if (regime == Regime::nonuniform) {
        t.beta = (inv_p + 2 * dd + 3) / (4 * dd + 7);
    } else {
        if (d != 1) throw InputError("the scalar-improved exponent needs d = 1");
        t.beta = (p.infinite || p.value >= 4) ? Rational{3, 8} : inv_p / 2 + Rational{1, 4};
    }
    return t;
}

Rational billiard_exponent(int d) {
    if (d < 1) throw InputError("dimension d must be at least 1");
    return Rational{6 * std::int64_t{d} + 10, 12 * std::int64_t{d} + 21};
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace asiplab::stats
