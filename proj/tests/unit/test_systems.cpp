#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "asiplab/common/error.hpp"
#include "asiplab/systems/interval_maps.hpp"
#include "asiplab/systems/lorentz.hpp"
#include "asiplab/systems/markov_shift.hpp"
#include "doctest.h"

using namespace asiplab;
using namespace asiplab::systems;

namespace {

// Left preimages of 1/2 under x(1 + 2^g x^g), by plain bisection.
std::vector<double> left_preimages(double gamma, int count) {
    std::vector<double> a{0.5};
    for (int k = 1; k < count; ++k) {
        double lo = 0.0, hi = a.back();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = mid * (1.0 + std::pow(2.0, gamma) * std::pow(mid, gamma));
            (f < a.back() ? lo : hi) = mid;
        }
        a.push_back(0.5 * (lo + hi));
    }
    return a;
}

LorentzConfig lone_disk() {
    LorentzConfig c;
    c.a1 = {10.0, 0.0};
    c.a2 = {0.0, 10.0};
    c.scatterers = {{{0.0, 0.0}, 0.4}};
    return c;
}

LorentzConfig shipped(const char* text) {
    std::istringstream in(text);
    return parse_lorentz_config(in);
}

const char* kTriangular =
    "lattice 1 0 0.5 0.8660254037844386\n"
    "scatterer 0 0 0.45\n";
const char* kSquareTwoDisk =
    "lattice 1 0 0 1\n"
    "scatterer 0 0 0.4\n"
    "scatterer 0.5 0.5 0.2\n";

}  // namespace

TEST_CASE("markov model validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.6, 0.5, 0.5;
    CHECK_THROWS_AS(MarkovShiftModel{bad}, InputError);
    Eigen::MatrixXd periodic(2, 2);
    periodic << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(MarkovShiftModel{periodic}, SpectralDegeneracy);
    CHECK_THROWS_AS(MarkovShiftModel::full_shift(2, 1.0), InputError);

    const auto m = MarkovShiftModel::two_state(0.3);
    Eigen::VectorXd pi = m.stationary();
    CHECK((pi.transpose() * m.transition() - pi.transpose()).norm() < 1e-12);
    CHECK(m.second_eigenvalue_modulus() == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("shift_step follows the transition row") {
    const auto m = MarkovShiftModel::two_state(0.3);
    Rng rng(11);
    const int n = 200000;
    int flips = 0;
    for (int i = 0; i < n; ++i) flips += m.sample_next(0, rng) == 1;
    const double p = static_cast<double>(flips) / n;
    CHECK(std::abs(p - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / n));
    CHECK_THROWS_AS(m.sample_next(2, rng), InputError);
    CHECK_THROWS_AS(m.sample_next(-1, rng), InputError);
}

TEST_CASE("full 2-shift symbol frequency") {
    const auto m = MarkovShiftModel::full_shift(2);
    Rng rng(5);
    auto w = stationary_window(m, rng, 8);
    const int n = 400000;
    long ones = 0;
    for (int i = 0; i < n; ++i) ones += shift_step(m, w, rng);
    CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("two-state autocorrelation is (1-2a)^n") {
    const auto m = MarkovShiftModel::two_state(0.3);
    Rng rng(7);
    auto w = stationary_window(m, rng, 8);
    const int n = 400000;
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) {
        s[i] = w[0] == 0 ? 1 : -1;
        shift_step(m, w, rng);
    }
    for (int lag = 1; lag <= 4; ++lag) {
        double acc = 0.0;
        for (int i = 0; i + lag < n; ++i) acc += s[i] * s[i + lag];
        const double rho = acc / (n - lag);
        // variance of the lag product mean for this chain is about (1+r)/(1-r)/n with r = 0.16
        const double se = std::sqrt((1.0 + 0.16) / (1.0 - 0.16) / n) * 1.5;
        CHECK(std::abs(rho - std::pow(0.4, lag)) < 3.0 * se);
    }
}

TEST_CASE("separation time") {
    const auto m = MarkovShiftModel::full_shift(2, 0.5);
    std::vector<int> x{0, 1, 1, 0, 1, 0, 0}, y{0, 1, 1, 0, 1, 1, 0};
    auto sep = separation_time(m, x, y);
    CHECK(sep.time == 5);
    CHECK(sep.distance == doctest::Approx(std::pow(0.5, 5)));
    std::vector<int> z{1, 1, 1};
    sep = separation_time(m, x, z);
    CHECK(sep.time == 0);
    CHECK(sep.distance == 1.0);
    std::vector<int> u{0, 0, 0, 1}, v{0, 0, 0, 0};
    CHECK(separation_time(m, u, v).distance == 0.125);
}

TEST_CASE("symbol window keeps order") {
    SymbolWindow w(4);
    for (int s : {1, 2, 3, 4}) w.shift_in(s);
    CHECK(w[0] == 1);
    CHECK(w.back() == 4);
    w.shift_in(5);
    CHECK(w[0] == 2);
    CHECK(w[3] == 5);
}

TEST_CASE("doubling map") {
    CHECK(doubling_step(0.25) == 0.5);
    CHECK(doubling_step(0.0) == 0.0);
    CHECK(doubling_step(1.0 / 3.0) == 2.0 / 3.0);

    Rng rng(3);
    auto st = doubling_initial(rng);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = st.point();
        doubling_advance(st, rng);
        CHECK_LE(std::abs(st.point() - doubling_step(x)), 1e-15);
        sum += x;
    }
    CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("lsv map values") {
    const LsvModel m(0.5);
    CHECK(lsv_step(m, 0.25) == doctest::Approx(0.25 * (1.0 + std::sqrt(2.0) * 0.5)).epsilon(1e-15));
    CHECK(lsv_step(m, 0.25) == doctest::Approx(0.4267767).epsilon(1e-7));
    CHECK(lsv_step(m, 0.75) == 0.5);
    CHECK(lsv_step(m, 0.0) == 0.0);
    CHECK_THROWS_AS(LsvModel{1.0}, InputError);
    CHECK_THROWS_AS(LsvModel{0.0}, InputError);

    // branches are onto: left branch reaches 1 at 1/2, right branch [1/2,1] -> [0,1]
    CHECK(m.step(std::nextafter(0.5, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.step(0.5) == 0.0);
    CHECK(m.step(1.0) == 1.0);
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
        const double x = 0.5 * i / 1000.0;
        CHECK(m.step(x) > prev);
        prev = m.step(x);
    }
}

TEST_CASE("induced return") {
    const LsvModel m(0.5);
    auto r = induced_return(m, 0.75);
    CHECK(r.return_time == 1);
    CHECK(r.image == 0.5);
    CHECK(induced_return(m, 0.9).return_time == 1);
    CHECK_THROWS_AS(induced_return(m, 0.3), InputError);
    CHECK_THROWS_AS(induced_return(m, 0.5000001, 3), CappedReturn);
    try {
        induced_return(m, 0.5000001, 3);
    } catch (const CappedReturn& e) {
        CHECK(e.cap() == 3);
    }
}

TEST_CASE("induced branches map onto Lambda") {
    for (double gamma : {0.3, 0.5, 0.8}) {
        const LsvModel m(gamma);
        const auto branches = lsv_branches(m, 40);
        const double c = std::pow(2.0, gamma);
        auto left = [&](double x) { return x * (1.0 + c * std::pow(x, gamma)); };
        for (const auto& b : branches) {
            double lo = 2.0 * b.lo - 1.0, hi = 2.0 * b.hi - 1.0;
            for (std::uint64_t k = 1; k < b.return_time; ++k) {
                lo = left(lo);
                hi = left(hi);
            }
            CHECK(lo == doctest::Approx(0.5).epsilon(1e-8));
            CHECK(hi == doctest::Approx(1.0).epsilon(1e-8));
            // interior points return after exactly return_time steps
            const double mid = 0.5 * (b.lo + b.hi);
            CHECK(induced_return(m, mid).return_time == b.return_time);
        }
    }
}

TEST_CASE("return-time survival matches left preimages") {
    const double gamma = 0.3;
    const LsvModel m(gamma);
    const auto a = left_preimages(gamma, 60);
    Rng rng(21);
    const std::size_t n = 1'000'000;
    const auto times = sample_return_times(m, n, rng);
    for (int k : {1, 2, 5, 10, 50}) {
        double over = 0.0;
        for (auto t : times) over += t > static_cast<std::uint64_t>(k);
        const double p_hat = over / n;
        const double p = a[k - 1];
        CHECK(std::abs(p_hat - p) < 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
    // sum_j j * freq(Lambda_j) is stable as the sample grows
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n / 10; ++i) m1 += static_cast<double>(times[i]);
    for (auto t : times) m2 += static_cast<double>(t);
    m1 /= static_cast<double>(n / 10);
    m2 /= static_cast<double>(n);
    CHECK(std::abs(m1 - m2) / m2 < 0.05);
}

TEST_CASE("lorentz collision examples") {
    const auto cfg = lone_disk();
    auto hit = next_collision(cfg, FlowState{{1.0, 0.0}, {-1.0, 0.0}});
    CHECK(hit.point.x == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(std::abs(hit.point.y) < 1e-15);
    CHECK(hit.time == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(hit.velocity.x == doctest::Approx(1.0));
    CHECK(std::abs(hit.velocity.y) < 1e-15);

    const double h = 1.0 / std::sqrt(2.0);
    hit = next_collision(cfg, FlowState{{1.0, 1.0}, {-h, -h}});
    CHECK(hit.time == doctest::Approx(std::sqrt(2.0) - 0.4).epsilon(1e-14));
    CHECK(hit.velocity.x == doctest::Approx(h).epsilon(1e-14));
    CHECK(hit.velocity.y == doctest::Approx(h).epsilon(1e-14));

    // impact parameter 0.5 > 0.4: the ray misses every disk before the cutoff
    CHECK_FALSE(cfg.geometry().first_hit(Vec2{1.0, 0.5}, Vec2{-1.0, 0.0}, 5.0).has_value());
    CHECK_THROWS_AS(next_collision(cfg, FlowState{{1.0, 0.5}, {-1.0, 0.0}}, 30.0), HorizonViolation);

    // grazing within tolerance counts as a miss
    CHECK_FALSE(cfg.geometry().first_hit(Vec2{1.0, 0.4 - 1e-14}, Vec2{-1.0, 0.0}, 5.0).has_value());
}

TEST_CASE("lorentz config parsing and validation") {
    auto tri = shipped(kTriangular);
    CHECK(tri.scatterers.size() == 1);
    CHECK(tri.grazing_tolerance == 1e-12);
    auto again = shipped(format_lorentz_config(tri).c_str());
    CHECK(again.a2.y == tri.a2.y);

    CHECK_THROWS_AS(shipped("lattice 1 0 0 1\nscatterer 0 0 0.6\n"), InputError);
    CHECK_THROWS_AS(shipped("lattice 1 0 0 1\nscatterer 0 0 0.3\nscatterer 0.5 0 0.3\n"), InputError);
    CHECK_THROWS_AS(shipped("lattice 1 0 0 1\nscatterer 0 0 -1\n"), InputError);
    CHECK_THROWS_AS(shipped("lattice 1 0 0 1\ncolour red\n"), InputError);
    CHECK_THROWS_AS(shipped("scatterer 0 0 0.1\n"), InputError);
    CHECK_THROWS_AS(shipped("lattice 1 0 2 0\n"), InputError);
}

TEST_CASE("finite horizon check") {
    LorentzConfig square;
    square.scatterers = {{{0.0, 0.0}, 0.3}};
    auto rep = check_finite_horizon(square, 64, 30.0);
    CHECK_FALSE(rep.finite);

    LorentzConfig empty;
    rep = check_finite_horizon(empty, 64, 30.0);
    CHECK_FALSE(rep.finite);
    CHECK(rep.rays == 0);

    CHECK_THROWS_AS(check_finite_horizon(square, 64, 1.0), InputError);

    for (const char* text : {kTriangular, kSquareTwoDisk}) {
        auto cfg = shipped(text);
        rep = check_finite_horizon(cfg, 2048, 30.0);
        REQUIRE(rep.finite);
        CHECK(rep.max_free_flight > 0.0);
        CHECK(rep.max_free_flight < 3.0);

        // simulated flights never exceed the reported bound
        cfg.horizon_bound = rep.max_free_flight;
        const auto geo = cfg.geometry();
        Rng rng(99);
        double longest = 0.0;
        for (int traj = 0; traj < 20; ++traj) {
            FlowState st = sample_liouville(cfg, geo, rng);
            collide(geo, st, cfg.effective_cutoff());
            for (int i = 0; i < 5000; ++i) longest = std::max(longest, collide(geo, st, cfg.effective_cutoff()).time);
        }
        CHECK(longest <= rep.max_free_flight * (1.0 + 1e-9));
    }
}

TEST_CASE("lorentz energy conservation") {
    auto cfg = shipped(kTriangular);
    const auto geo = cfg.geometry();
    Rng rng(1);
    FlowState st = sample_liouville(cfg, geo, rng);
    double worst = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        collide(geo, st, 20.0);
        worst = std::max(worst, std::abs(norm(st.v) - 1.0));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("lorentz time reversibility") {
    using Real = boost::multiprecision::cpp_bin_float_100;
    using V = BasicVec2<Real>;
    auto cfg = shipped(kTriangular);
    std::vector<LorentzGeometry<Real>::Disk> disks{{V{0, 0}, Real("0.45")}};
    const LorentzGeometry<Real> geo(V{1, 0}, V{Real("0.5"), sqrt(Real(3)) / 2}, disks, Real("1e-12"));

    Rng rng(17);
    const auto start = sample_liouville(cfg, cfg.geometry(), rng);
    V q{start.q.x, start.q.y}, v{start.v.x, start.v.y};
    v = (Real(1) / norm(v)) * v;  // unit to working precision
    const V q0 = q, v0 = v;
    Real first_flight = 0;
    V incoming = v;
    for (int i = 0; i < 100; ++i) {
        auto hit = geo.first_hit(q, v, Real(20));
        REQUIRE(hit.has_value());
        if (i == 0) first_flight = hit->time;
        incoming = v;
        q = hit->point;
        v = hit->velocity;
    }
    // reverse the velocity at the last impact and replay back to the first one
    v = Real(-1) * incoming;
    for (int i = 0; i < 99; ++i) {
        auto hit = geo.first_hit(q, v, Real(20));
        REQUIRE(hit.has_value());
        q = hit->point;
        v = hit->velocity;
    }
    const V end = q + first_flight * v;
    CHECK(static_cast<double>(norm(end - q0)) < 1e-6);
    CHECK(static_cast<double>(norm(v + v0)) < 1e-6);
}
