#include <algorithm>
#include <cmath>
#include <numeric>

#include "asiplab/common/error.hpp"
#include "asiplab/simulate/ensemble.hpp"
#include "asiplab/simulate/systems.hpp"
#include "asiplab/stats/burkholder.hpp"
#include "asiplab/stats/charfn.hpp"
#include "asiplab/stats/clt.hpp"
#include "asiplab/stats/covariance.hpp"
#include "asiplab/stats/exponent.hpp"
#include "asiplab/stats/lil.hpp"
#include "asiplab/stats/mixing_empirical.hpp"
#include "asiplab/stats/tails.hpp"
#include "asiplab/transfer/coboundary.hpp"
#include "asiplab/transfer/operator.hpp"
#include "doctest.h"

using namespace asiplab;
using namespace asiplab::stats;
using systems::MarkovShiftModel;

namespace {

// Reduced fraction num/den with plain integers.
std::pair<long long, long long> reduce(long long num, long long den) {
    long long g = std::gcd(num, den);
    return {num / g, den / g};
}

void check_fraction(const Rational& r, long long num, long long den) {
    auto [n, d] = reduce(num, den);
    CHECK(r.numerator() == n);
    CHECK(r.denominator() == d);
}

transfer::CylinderFunction pm1(const transfer::CylinderSpace& s) {
    return transfer::tabulate(s, 1, [](std::span<const int> w, std::span<double> out) {
        out[0] = w[0] == 0 ? 1.0 : -1.0;
    });
}

std::vector<double> gaussian_samples(std::size_t K, const Eigen::MatrixXd& sigma, std::uint64_t N,
                                     std::uint64_t seed) {
    Eigen::MatrixXd L = sigma.llt().matrixL();
    const int d = static_cast<int>(sigma.rows());
    Rng rng(seed);
    NormalSampler normal;
    std::vector<double> out(K * d);
    Eigen::VectorXd z(d);
    for (std::size_t k = 0; k < K; ++k) {
        for (int c = 0; c < d; ++c) z(c) = normal(rng);
        Eigen::VectorXd s = L * z * std::sqrt(double(N));
        for (int c = 0; c < d; ++c) out[k * d + c] = s(c);
    }
    return out;
}

std::vector<double> iid_pm1_sums(std::size_t K, std::uint64_t N, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(K);
    for (auto& s : out) {
        long long acc = 0;
        for (std::uint64_t n = 0; n < N; ++n) acc += (rng() >> 63) ? 1 : -1;
        s = double(acc);
    }
    return out;
}

}  // namespace

TEST_CASE("asip exponent formulas in exact rationals") {
    check_fraction(asip_exponent(2, MomentOrder::inf(), Regime::nonuniform).beta, 7, 15);
    check_fraction(asip_exponent(1, MomentOrder::inf(), Regime::axiom_a).beta, 5, 11);
    check_fraction(asip_exponent(1, MomentOrder::of(4), Regime::scalar_improved).beta, 3, 8);
    check_fraction(asip_exponent(1, MomentOrder::of(10), Regime::scalar_improved).beta, 3, 8);
    check_fraction(asip_exponent(1, MomentOrder::of(3), Regime::scalar_improved).beta, 2 + 3, 4 * 3);
    CHECK(asip_exponent(1, MomentOrder::of(3), Regime::nonuniform).beta == Rational(16, 33));

    // nonuniform against (1/p + 2d + 3)/(4d + 7) = (q + (2d+3) p') / (p'(4d+7)) for p = p'/q
    for (int d = 1; d <= 6; ++d) {
        CHECK(asip_exponent(d, MomentOrder::of(3), Regime::nonuniform).beta == billiard_exponent(d));
        for (long long pn = 5; pn <= 40; pn += 7)
            for (long long pd = 1; pd <= 2; ++pd) {
                if (pn <= 2 * pd) continue;
                auto b = asip_exponent(d, MomentOrder::of(Rational(pn, pd)), Regime::nonuniform).beta;
                check_fraction(b, pd + (2LL * d + 3) * pn, pn * (4LL * d + 7));
            }
    }
    // scalar: 1/(2p) + 1/4 = (2 + p) / (4p) below p = 4
    for (long long pn = 5; pn < 8; ++pn)
        check_fraction(asip_exponent(1, MomentOrder::of(Rational(pn, 2)), Regime::scalar_improved).beta,
                       2 * 2 + pn, 4 * pn);

    CHECK_THROWS_AS(asip_exponent(1, MomentOrder::of(2), Regime::nonuniform), HypothesisError);
    CHECK_THROWS_AS(asip_exponent(1, MomentOrder::of(Rational(3, 2)), Regime::scalar_improved), HypothesisError);
    CHECK_THROWS_AS(asip_exponent(0, MomentOrder::inf(), Regime::nonuniform), InputError);
    CHECK_THROWS_AS(asip_exponent(2, MomentOrder::of(5), Regime::scalar_improved), InputError);
    CHECK(to_string(Rational(7, 15)) == "7/15");
    CHECK(MomentOrder::parse("7/2").value == Rational(7, 2));
    CHECK(MomentOrder::parse("inf").infinite);
    CHECK_THROWS_AS(MomentOrder::parse("x3"), InputError);
    CHECK(parse_regime("axiom-A") == Regime::axiom_a);
}

TEST_CASE("asip exponent monotonicity and range") {
    std::vector<MomentOrder> ps;
    for (long long p = 21; p <= 200; p += 9) ps.push_back(MomentOrder::of(Rational(p, 10)));
    ps.push_back(MomentOrder::inf());
    for (auto regime : {Regime::nonuniform, Regime::scalar_improved}) {
        const int dmax = regime == Regime::scalar_improved ? 1 : 8;
        for (int d = 1; d <= dmax; ++d) {
            Rational prev(1, 1);
            for (const auto& p : ps) {
                auto b = asip_exponent(d, p, regime).beta;
                CHECK(b < Rational(1, 2));
                CHECK(b >= Rational(1, 4));
                CHECK(b <= prev);
                prev = b;
                if (regime == Regime::nonuniform && d > 1) CHECK(b > asip_exponent(d - 1, p, regime).beta);
            }
        }
    }
}

TEST_CASE("empirical covariance") {
    SUBCASE("zero observable") {
        std::vector<double> zeros(100, 0.0);
        auto est = empirical_sigma(zeros, 2, 1000);
        CHECK(est.sigma_hat.isZero(0.0));
        CHECK_FALSE(est.nonsingular);
    }
    SUBCASE("gaussian sample recovers Sigma within its stderr") {
        Eigen::MatrixXd sigma(2, 2);
        sigma << 2.0, 0.6, 0.6, 1.0;
        auto s = gaussian_samples(20000, sigma, 500, 11);
        auto est = empirical_sigma(s, 2, 500);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(est.sigma_hat(i, j) - sigma(i, j)) < 4.0 * est.stderr_(i, j));
        // var(X^2) = 2 sigma^4 for a centred normal
        CHECK(est.stderr_(0, 0) == doctest::Approx(std::sqrt(2.0 / 20000) * 2.0).epsilon(0.05));
        CHECK((est.sigma_hat - est.sigma_hat.transpose()).norm() == 0.0);
        CHECK(est.nonsingular);
    }
    SUBCASE("doubling map cos 2 pi x has sigma^2 = 1/2 at every N") {
        simulate::DoublingSystem sys;
        auto obs = simulate::cos2pi_observable();
        std::vector<std::uint64_t> grid{1000};
        auto ens = simulate::run_ensemble(sys, obs, 1000, grid, 2000, 5, 1);
        auto est = empirical_sigma(ens, 1000);
        CHECK(std::abs(est.sigma_hat(0, 0) - 0.5) < 4.0 * est.stderr_(0, 0));
        CHECK_THROWS_AS(empirical_sigma(ens, 999), InputError);
    }
    std::vector<double> few(20, 1.0);
    CHECK_THROWS_AS(empirical_sigma(few, 1, 10), InputError);
}

TEST_CASE("characteristic function") {
    const auto full = MarkovShiftModel::full_shift(2);
    const auto op = transfer::TransferOperator::build(full, 1);
    const auto phi = pm1(op.space());
    ExactCharFn exact = [&](std::span<const double> u, std::uint64_t N) {
        return transfer::char_fn_exact(op, phi, u, N);
    };
    auto closed = [](double u, std::uint64_t N) { return std::pow(std::cos(u / std::sqrt(double(N))), double(N)); };
    const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);

    SUBCASE("operator char fn equals cos^N for IID +-1") {
        for (std::uint64_t N : {100ULL, 1000ULL, 10000ULL})
            for (double u : {0.5, 1.0, 2.5}) {
                double uu[1] = {u};
                CHECK(std::abs(exact(uu, N) - closed(u, N)) < 1e-12);
            }
        double one_u[1] = {1.0};
        // 100 log cos(0.1) = -1/2 - 1/1200 - 1/450000 - O(1e-8)
        const double series = std::exp(-0.5 - 1.0 / 1200 - 1.0 / 450000);
        CHECK(closed(1.0, 100) == doctest::Approx(series).epsilon(1e-7));
        CHECK(std::abs(closed(1.0, 100) - gaussian_char_fn(one, one_u)) ==
              doctest::Approx(std::exp(-0.5) - series).epsilon(1e-4));
    }
    SUBCASE("u = 0 and hermitian symmetry") {
        auto s = iid_pm1_sums(500, 100, 3);
        double zero[1] = {0.0};
        CHECK(empirical_char_fn(s, 1, 100, zero) == std::complex<double>(1.0, 0.0));
        CHECK(gaussian_char_fn(one, zero) == 1.0);
        Eigen::MatrixXd sigma(2, 2);
        sigma << 1.0, 0.3, 0.3, 2.0;
        auto g = gaussian_samples(500, sigma, 10, 4);
        for (double a : {0.3, 1.7}) {
            double u[2] = {a, -0.4}, v[2] = {-a, 0.4};
            CHECK(empirical_char_fn(g, 2, 10, v) == std::conj(empirical_char_fn(g, 2, 10, u)));
        }
    }
    SUBCASE("exact deviation decays like 1/N") {
        auto grid = scalar_grid(4.0, 16);
        std::vector<double> ns, ds;
        for (int i = 0; i <= 12; ++i) {
            auto N = static_cast<std::uint64_t>(std::llround(100.0 * std::pow(10.0, i / 4.0)));
            double d = 0.0;
            for (double u : grid) d = std::max(d, std::abs(closed(u, N) - std::exp(-u * u / 2)));
            ns.push_back(double(N));
            ds.push_back(d);
        }
        CHECK(coupling::exponent_fit(ns, ds).slope <= -0.9);
    }
    SUBCASE("ensemble D_N agrees with the exact oracle") {
        simulate::MarkovSystem sys(full, 2);
        auto obs = simulate::pm1_observable(full);
        auto checkpoints = simulate::geometric_checkpoints(400, 50);
        auto ens = simulate::run_ensemble(sys, obs, 400, checkpoints, 20000, 9, 2);
        auto grid = scalar_grid(3.0, 12);
        auto res = char_fn_test(ens, one, grid, checkpoints, 1.0, exact);
        CHECK(res.fit_on_exact);
        for (const auto& p : res.points) {
            REQUIRE(p.matches_exact.has_value());
            CHECK(*p.matches_exact);
        }
        CHECK(res.fit.slope < -0.9);
        CHECK(res.verdict.status == Status::pass);
    }
    SUBCASE("grid is trimmed to |u| <= epsilon sqrt N") {
        auto s = iid_pm1_sums(200, 16, 1);
        std::vector<double> grid{1.0, 2.0, 5.0};
        auto pt = char_fn_point(s, 1, 16, one, grid, 1.0);
        CHECK(pt.trimmed == 1);
        CHECK(pt.grid_used == 2);
    }
}

TEST_CASE("CLT tests") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 2.0, -0.5, -0.5, 1.0;
    CltOptions opt;
    opt.bootstrap = 99;
    opt.workers = 2;

    SUBCASE("expected distance to a standard normal") {
        Rng rng(7);
        NormalSampler normal;
        for (int d : {1, 2, 3}) {
            for (double r : {0.0, 0.7, 2.5}) {
                double acc = 0.0;
                const int M = 400000;
                for (int m = 0; m < M; ++m) {
                    double s = 0.0;
                    for (int c = 0; c < d; ++c) {
                        double x = normal(rng) - (c == 0 ? r : 0.0);
                        s += x * x;
                    }
                    acc += std::sqrt(s);
                }
                CHECK(expected_normal_distance(d, r) == doctest::Approx(acc / M).epsilon(4e-3));
            }
        }
        CHECK(expected_normal_distance(1, 0.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    }
    SUBCASE("null samples pass") {
        auto s = gaussian_samples(2000, sigma, 100, 21);
        auto res = clt_test(s, 2, 100, sigma, opt);
        CHECK(res.energy_p > 0.01);
        for (const auto& k : res.ks) CHECK(k.p_value > 0.01);
        CHECK(res.verdict.status == Status::pass);
    }
    SUBCASE("a non-gaussian sample fails") {
        Rng rng(3);
        std::vector<double> s(2000);
        for (auto& x : s) x = (uniform01(rng) - 0.5) * std::sqrt(12.0);
        auto res = clt_test(s, 1, 1, Eigen::MatrixXd::Identity(1, 1), opt);
        CHECK(res.energy_p <= 0.01);
        CHECK(res.ks[0].p_value < 0.01);
    }
    SUBCASE("energy statistic is invariant under joint linear maps") {
        auto s = gaussian_samples(1500, sigma, 1, 5);
        Eigen::MatrixXd A(2, 2);
        A << 3.0, 1.0, -2.0, 0.5;
        std::vector<double> t(s.size());
        for (std::size_t k = 0; k < s.size() / 2; ++k) {
            Eigen::Vector2d v(s[2 * k], s[2 * k + 1]);
            Eigen::Vector2d w = A * v;
            t[2 * k] = w(0);
            t[2 * k + 1] = w(1);
        }
        double e1 = energy_statistic(whiten(s, 2, 1, sigma));
        double e2 = energy_statistic(whiten(t, 2, 1, A * sigma * A.transpose()));
        CHECK(std::abs(e1 - e2) < 1e-10);
    }
    SUBCASE("bootstrap does not depend on the worker count") {
        auto s = gaussian_samples(500, sigma, 1, 8);
        CltOptions a = opt, b = opt;
        a.workers = 1;
        b.workers = 3;
        a.sigma_estimated = b.sigma_estimated = true;
        CHECK(clt_test(s, 2, 1, sigma, a).bootstrap == clt_test(s, 2, 1, sigma, b).bootstrap);
    }
    SUBCASE("two-state chain sums are close to N(0, 7/3)") {
        const auto chain = MarkovShiftModel::two_state(0.3);
        simulate::MarkovSystem sys(chain, 2);
        auto obs = simulate::pm1_observable(chain);
        std::vector<std::uint64_t> grid{10000};
        auto ens = simulate::run_ensemble(sys, obs, 10000, grid, 10000, 100, 2);
        auto res = clt_test(ens.column(0), 1, 10000, Eigen::MatrixXd::Constant(1, 1, 7.0 / 3.0), opt);
        CHECK(res.ks[0].statistic <= 0.02);
    }
    CHECK_THROWS_AS(whiten(std::vector<double>(4, 1.0), 2, 1, Eigen::MatrixXd::Zero(2, 2)), InputError);
}

TEST_CASE("LIL family") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    SUBCASE("zero observable") {
        LilTracker t(one, 100);
        for (int i = 0; i < 20000; ++i) t.push(0.0);
        CHECK(t.tail_sup() == 0.0);
        CHECK(lil_result(t).tail_sup == 0.0);
    }
    SUBCASE("tracker against a stored path") {
        for (int d : {1, 2}) {
            Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d);
            if (d == 2) sigma << 2.0, 0.5, 0.5, 1.0;
            Eigen::MatrixXd inv = sigma.inverse();
            LilTracker t(sigma, 1000);
            Rng rng(40 + d);
            std::vector<double> x(d), s(d, 0.0);
            double best = 0.0;
            for (std::uint64_t n = 1; n <= 50000; ++n) {
                for (int c = 0; c < d; ++c) s[c] += (x[c] = standard_normal(rng));
                t.push(x);
                Eigen::Map<Eigen::VectorXd> v(s.data(), d);
                double a = std::sqrt(v.dot(inv * v) / (2.0 * n * std::log(std::log(double(n)))));
                if (n >= 1000) best = std::max(best, a);
            }
            CHECK(t.tail_sup() == doctest::Approx(best).epsilon(1e-12));
        }
        auto r = iid_normal_lil(20000, 1, 3);
        CHECK(r.tail_start == 10000);
        CHECK(r.N == 20000);
        CHECK_THROWS_AS(LilTracker(Eigen::MatrixXd::Identity(1, 1), 10), InputError);
    }
    SUBCASE("Strassen distance of simple paths") {
        const std::uint64_t n = 1000;
        std::vector<double> zero(n, 0.0), line(n), twice(n);
        for (std::uint64_t i = 1; i <= n; ++i) {
            line[i - 1] = double(i) / n;
            twice[i - 1] = 2.0 * double(i) / n;
        }
        CHECK(strassen_distance(zero, 1).distance_bound == 0.0);
        auto l = strassen_distance(line, 1);
        CHECK(l.energy == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(l.distance_bound < 1e-12);
        auto t = strassen_distance(twice, 1);
        CHECK(t.energy == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(t.distance_bound == doctest::Approx(1.0).epsilon(1e-12));

        // the line plus a zig-zag of height delta: per-step energy ~ n delta^2,
        // yet the line itself lies in the ball, so the distance is at most delta
        const double delta = 0.01;
        std::vector<double> zig(n);
        for (std::uint64_t i = 1; i <= n; ++i) zig[i - 1] = line[i - 1] + (i % 2 ? delta : 0.0);
        auto z = strassen_distance(zig, 1);
        CHECK(z.energy > 50.0);
        CHECK(z.distance_bound <= delta + 1e-12);
        CHECK(z.knots > 0);
    }
    SUBCASE("polygon energy is additive") {
        Rng rng(2);
        std::vector<double> path(2 * 3000);
        for (auto& x : path) x = standard_normal(rng);
        long double whole = polygon_energy(path, 2, 3000, 0, 3000);
        for (std::uint64_t k : {1ULL, 17ULL, 1500ULL, 2999ULL}) {
            long double parts = polygon_energy(path, 2, 3000, 0, k) + polygon_energy(path, 2, 3000, k, 3000);
            CHECK(std::abs(static_cast<double>(parts - whole)) <= 1e-14 * static_cast<double>(whole));
        }
    }
    SUBCASE("functional LIL path scaling") {
        // S_i = sqrt(2 n log log n) * i / n gives the unit line
        const std::uint64_t n = 5000;
        const double c = lil_normaliser(n);
        std::vector<double> s(n);
        for (std::uint64_t i = 1; i <= n; ++i) s[i - 1] = c * double(i) / n;
        CHECK(functional_lil(s, 1, n, one).distance_bound < 1e-12);
        CHECK_THROWS_AS(functional_lil(s, 1, 500, one), InputError);
    }
    SUBCASE("Chung statistic") {
        std::vector<double> zero(1000, 0.0);
        std::vector<std::uint64_t> cps{100, 1000};
        auto z = chung_statistic(zero, 1, one, cps);
        CHECK(z == std::vector<double>{0.0, 0.0});

        Rng rng(6);
        std::vector<double> firsts;
        std::vector<std::uint64_t> grid{100, 400, 1600, 6400, 10000};
        for (int k = 0; k < 2000; ++k) {
            std::vector<double> path(10000);
            double s = 0.0;
            for (auto& x : path) x = (s += (rng() >> 63) ? 1.0 : -1.0);
            auto st = chung_statistic(path, 1, one, grid);
            for (std::size_t i = 1; i < grid.size(); ++i)
                CHECK(st[i] * std::sqrt(double(grid[i])) >= st[i - 1] * std::sqrt(double(grid[i - 1])) * (1.0 - 1e-12));
            firsts.push_back(st.back());
        }
        CHECK(quantile(firsts, 0.01) > 0.0);
    }
    SUBCASE("class integrand") {
        std::vector<double> u{std::exp(1.0)}, phi{2.0};
        CHECK(class_integrand(2, u, phi)[0] == doctest::Approx(4.0 / std::exp(1.0) * std::exp(-2.0)));
    }
}

TEST_CASE("Burkholder check") {
    SUBCASE("suffix maxima against a direct scan") {
        Rng rng(1);
        std::vector<double> psi(300);
        for (auto& x : psi) x = standard_normal(rng);
        std::vector<std::uint64_t> grid{1, 2, 10, 57, 300};
        auto fast = suffix_maxima(psi, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double best = 0.0;
            for (std::uint64_t l = 1; l <= grid[g]; ++l) {
                double s = 0.0;
                for (std::uint64_t k = l; k <= grid[g]; ++k) s += psi[k - 1];
                best = std::max(best, std::abs(s));
            }
            CHECK(fast[g] == doctest::Approx(best).epsilon(1e-12));
        }
    }
    std::vector<std::uint64_t> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<std::uint64_t>(std::llround(100 * std::pow(10.0, i / 5.0))));
    BurkholderOptions opt;
    opt.trajectories = 1000;
    opt.workers = 2;
    SUBCASE("zero kernel") {
        auto res = burkholder_check([&](std::uint64_t) { return std::vector<double>(grid.back(), 0.0); }, grid, opt);
        CHECK(*std::max_element(res.ratio.begin(), res.ratio.end()) == 0.0);
        CHECK(res.verdict.status == Status::pass);
    }
    SUBCASE("IID +-1 at p = 4") {
        auto res = burkholder_check(
            [&](std::uint64_t seed) {
                Rng rng(seed);
                std::vector<double> v(grid.back());
                for (auto& x : v) x = (rng() >> 63) ? 1.0 : -1.0;
                return v;
            },
            grid, opt);
        for (double r : res.ratio) CHECK(r < 2.2);
        CHECK(std::abs(res.fit.slope) <= 0.05);
        CHECK(res.verdict.status == Status::pass);
    }
    SUBCASE("two-state kernel observable at p = 3") {
        const auto chain = MarkovShiftModel::two_state(0.3);
        const auto op = transfer::TransferOperator::build(chain, 1);
        const auto cob = transfer::coboundary_solve(op, pm1(op.space()));
        opt.p = 3.0;
        opt.kernel_residual = cob.l_psi_norm;
        auto res = burkholder_check(
            [&](std::uint64_t seed) { return markov_kernel_sequence(chain, cob, grid.back(), seed); }, grid, opt);
        CHECK(std::abs(res.fit.slope) <= 0.05);

        opt.kernel_residual = 0.1;
        CHECK_THROWS_AS(burkholder_check([&](std::uint64_t) { return std::vector<double>(grid.back()); }, grid, opt),
                        HypothesisError);
    }
    opt.p = 2.0;
    CHECK_THROWS_AS(burkholder_check([&](std::uint64_t) { return std::vector<double>(grid.back()); }, grid, opt),
                    InputError);
}

TEST_CASE("return time tails") {
    SUBCASE("bounded return time") {
        ReturnTimeSample s{std::vector<std::uint64_t>(200000, 1), "full shift"};
        auto fit = return_tail_fit(s);
        CHECK(fit.bounded);
        for (const auto& m : fit.moments) {
            CHECK(m.mean == 1.0);
            CHECK(m.stderr_ == 0.0);
        }
        for (double p : {3.0, 100.0}) CHECK(lp_verdict(fit, p).status == Status::pass);
    }
    // R = ceil(1000 X) with P(X > x) = x^{-alpha}
    auto pareto = [](double alpha, std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        ReturnTimeSample s;
        for (std::size_t i = 0; i < n; ++i)
            s.times.push_back(static_cast<std::uint64_t>(std::ceil(1000.0 * std::pow(uniform01_open_low(rng), -1.0 / alpha))));
        return s;
    };
    SUBCASE("pareto exponent and verdicts") {
        auto fit = return_tail_fit(pareto(3.5, 1'000'000, 4));
        CHECK(fit.exponent == doctest::Approx(3.5).epsilon(0.03));
        CHECK(lp_verdict(fit, 3.0).status == Status::pass);
        CHECK(lp_verdict(fit, 4.0).status == Status::fail);
        CHECK(fit.moments[0].mean == doctest::Approx(1000.0 * 3.5 / 2.5).epsilon(0.01));
    }
    SUBCASE("small samples are inconclusive") {
        auto fit = return_tail_fit(pareto(3.5, 50'000, 5));
        CHECK_FALSE(fit.enough_samples);
        CHECK(lp_verdict(fit, 3.0).status == Status::inconclusive);
    }
}

TEST_CASE("empirical mixing") {
    std::vector<int> a{0}, b{0};
    std::vector<std::uint64_t> lags{0, 1, 2, 3, 4, 5, 6};
    MixingSampling s;
    s.trajectories = 100;
    s.length = 1'000'000;
    s.workers = 2;
    SUBCASE("full shift is independent") {
        auto res = mixing_decay_empirical(MarkovShiftModel::full_shift(2), a, b, lags, s);
        for (const auto& m : res.lags) CHECK(m.exact == 0.0);
        CHECK(res.max_abs_z <= 3.0);
    }
    SUBCASE("two-state chain decays at the second eigenvalue") {
        auto res = mixing_decay_empirical(MarkovShiftModel::two_state(0.3), a, b, lags, s);
        CHECK(res.tau == doctest::Approx(0.4).epsilon(0.025));
        CHECK(res.max_abs_z <= 3.0);
        // exact: pi_0 (P^{n+1}(0,0) - pi_0) = 0.25 * 0.4^{n+1}
        for (const auto& m : res.lags) CHECK(m.exact == doctest::Approx(0.25 * std::pow(0.4, m.lag + 1)).epsilon(1e-10));
    }
}
