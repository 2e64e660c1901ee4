#include "asiplab/blocking/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "asiplab/common/error.hpp"

namespace asiplab::blocking {

namespace {

constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;

std::optional<std::pair<long, long>> as_rational(double e) {
    for (long q = 1; q <= 64; ++q) {
        const double p = std::round(e * static_cast<double>(q));
        if (std::abs(p / static_cast<double>(q) - e) <= 1e-13 * std::max(1.0, std::abs(e)))
            return std::pair{static_cast<long>(p), q};
    }
    return std::nullopt;
}

using Rational = std::optional<std::pair<long, long>>;

std::uint64_t floor_pow_with(std::uint64_t j, double e, const Rational& rational) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw InputError("floor_pow: exponent must be finite and non-negative");
    if (j == 0) return e == 0.0 ? 1 : 0;
    if (j == 1 || e == 0.0) return 1;
    if (e * std::log2(static_cast<double>(j)) > 62.0) throw InputError("floor_pow: j^e exceeds 2^62");
    const long double approx = std::pow(static_cast<long double>(j), static_cast<long double>(e));
    auto r = static_cast<std::uint64_t>(std::floor(approx));
    if (!rational) return r;

    using boost::multiprecision::cpp_int;
    const auto [p, q] = *rational;
    const cpp_int target = boost::multiprecision::pow(cpp_int(j), static_cast<unsigned>(p));
    auto pw = [q = q](std::uint64_t v) -> cpp_int { return boost::multiprecision::pow(cpp_int(v), static_cast<unsigned>(q)); };
    while (r > 0 && pw(r) > target) --r;
    while (pw(r + 1) <= target) ++r;
    return r;
}

}  // namespace

std::uint64_t floor_pow(std::uint64_t j, double e) { return floor_pow_with(j, e, as_rational(e)); }

BlockSchedule BlockSchedule::build(double Q, double alpha, std::uint64_t n_max) {
    if (!(alpha > 0.0) || !(Q > alpha) || !std::isfinite(Q))
        throw InputError("block schedule needs Q > alpha > 0");
    if (n_max < 1) throw InputError("block schedule needs n_max >= 1");
    BlockSchedule s;
    s.Q_ = Q;
    s.alpha_ = alpha;
    s.n_max_ = n_max;
    const auto rq = as_rational(Q), ra = as_rational(alpha);
    std::uint64_t P = 0;
    for (std::uint64_t j = 1; P < n_max; ++j) {
        const std::uint64_t lg = floor_pow_with(j, Q, rq);
        const std::uint64_t sh = floor_pow_with(j, alpha, ra);
        if (P > kLimit - lg - sh) throw InputError("block schedule boundary overflow");
        P += lg + sh;
        s.long_.push_back(lg);
        s.short_.push_back(sh);
        s.depth_.push_back(static_cast<int>(sh / 2));  // [x/2] = [[x]/2] for x >= 0
        s.boundary_.push_back(P);
    }
    return s;
}

std::size_t BlockSchedule::block_of(std::uint64_t N) const {
    if (N == 0 || boundary_.empty() || N > boundary_.back())
        throw InputError("time index " + std::to_string(N) + " outside the schedule");
    const auto it = std::lower_bound(boundary_.begin(), boundary_.end(), N);
    return static_cast<std::size_t>(it - boundary_.begin()) + 1;
}

void BlockSchedule::export_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "j,long,short,ell,P_j\n";
    for (std::size_t j = 1; j <= blocks(); ++j)
        out << j << ',' << long_size(j) << ',' << short_size(j) << ',' << cond_depth(j) << ',' << boundary(j) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

BlockSchedule extend_schedule(const BlockSchedule& schedule, std::size_t blocks) {
    if (schedule.blocks() >= blocks) return schedule;
    std::uint64_t n = schedule.boundary(schedule.blocks());
    for (std::size_t j = schedule.blocks() + 1; j <= blocks; ++j)
        n += floor_pow(j, schedule.Q()) + floor_pow(j, schedule.alpha());
    return BlockSchedule::build(schedule.Q(), schedule.alpha(), n);
}

BlockSchedule theorem_schedule(int d, std::uint64_t n_max) {
    if (d < 1) throw InputError("dimension must be positive");
    return BlockSchedule::build(4.0 * d + 6.5, 0.1, n_max);
}

BlockSchedule diagnostic_schedule(std::uint64_t n_max) { return BlockSchedule::build(2.0, 0.5, n_max); }

}  // namespace asiplab::blocking
