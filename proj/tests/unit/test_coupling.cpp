#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "asiplab/common/error.hpp"
#include "asiplab/coupling/coupled_run.hpp"
#include "asiplab/coupling/martingale.hpp"
#include "asiplab/coupling/skorokhod.hpp"
#include "asiplab/simulate/series.hpp"
#include "doctest.h"

using namespace asiplab;
using namespace asiplab::coupling;
using blocking::BlockSchedule;
using systems::MarkovShiftModel;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (points - 1)));
    return out;
}

// two-sample Kolmogorov-Smirnov distance
double ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("exponent fit on exact power laws") {
    const auto n = log_grid(10, 1e6, 16);
    std::vector<double> lin, root;
    for (double x : n) {
        lin.push_back(x);
        root.push_back(std::sqrt(x));
    }
    const auto f1 = exponent_fit(n, lin);
    CHECK(std::abs(f1.slope - 1.0) <= 1e-12);
    CHECK(f1.points == 16);
    CHECK(exponent_fit(n, root).slope == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exponent fit with multiplicative noise") {
    Rng rng(4);
    const auto n = log_grid(100, 1e6, 16);
    std::vector<double> v;
    for (double x : n) v.push_back(std::pow(x, 0.4) * (1.0 + 0.1 * (2 * uniform01(rng) - 1)));
    const auto f = exponent_fit(n, v);
    CHECK(std::abs(f.slope - 0.4) <= 0.03);
    CHECK(f.ci_low <= f.slope);
    CHECK(f.ci_high >= f.slope);
    CHECK(f.ci_high - f.ci_low < 0.05);
}

TEST_CASE("exponent fit edge cases") {
    const auto n = log_grid(1, 1e4, 10);
    CHECK(exponent_fit(n, std::vector<double>(10, 0.0)).all_zero);
    CHECK(std::isinf(exponent_fit(n, std::vector<double>(10, 0.0)).slope));
    std::vector<double> v(n);
    v[0] = v[3] = 0.0;
    const auto f = exponent_fit(n, v);
    CHECK(f.zeros_dropped == 2);
    CHECK(f.slope == doctest::Approx(1.0));
    CHECK_THROWS_AS(exponent_fit(std::vector<double>(n.begin(), n.begin() + 7), std::vector<double>(7, 1.0)), FitError);
    CHECK_THROWS_AS(exponent_fit(n, n, {100, 1e4}), FitError);
    std::vector<double> neg(n);
    neg[2] = -1;
    CHECK_THROWS_AS(exponent_fit(n, neg), InputError);
}

TEST_CASE("Brownian increments at record times") {
    BrownianPath path(3, 100'000);
    path.advance_to(100'000);
    const auto& w = path.records();
    REQUIRE(w.size() == 100'000);
    double sum = 0, sq = 0, prev = 0;
    for (double x : w) {
        sum += x - prev;
        sq += (x - prev) * (x - prev);
        prev = x;
    }
    CHECK(std::abs(sum / 1e5) < 0.02);
    CHECK(sq / 1e5 == doctest::Approx(1.0).epsilon(0.02));
    CHECK_THROWS_AS(path.advance_to(10), InputError);
}

TEST_CASE("exit of a symmetric interval") {
    BrownianPath path(8);
    double tsum = 0, tsq = 0, tfour = 0;
    int up = 0;
    const int runs = 200'000;
    for (int i = 0; i < runs; ++i) {
        const double start = path.value();
        const double t = path.run_to_exit(-1.0, 1.0);
        CHECK(t >= 0.0);
        tsum += t;
        tsq += t * t;

        tfour += t * t * t * t;
        if (path.value() > start) ++up;
    }
    const double mean = tsum / runs, se = std::sqrt((tsq / runs - mean * mean) / runs);
    // E T = 1 and E T^2 = 5/3 for the exit of (-1, 1)
    CHECK(std::abs(mean - 1.0) <= 3 * se);
    const double m2 = tsq / runs, se2 = std::sqrt((tfour / runs - m2 * m2) / runs);
    CHECK(std::abs(m2 - 5.0 / 3.0) <= 3 * se2);
    CHECK(std::abs(up / double(runs) - 0.5) <= 3 * 0.5 / std::sqrt(runs));
}

TEST_CASE("discrete law checks") {
    DiscreteLaw bad{{-1.0, 2.0}, {0.5, 0.5}};
    CHECK_THROWS_AS(bad.validate(), InputError);
    DiscreteLaw sizes{{-1.0}, {0.5, 0.5}};
    CHECK_THROWS_AS(sizes.validate(), InputError);
    const auto merged = merge_atoms({1.0, -1.0, 1.0 + 1e-16, 0.0}, {0.25, 0.5, 0.25, 0.0});
    CHECK(merged.atoms.size() == 2);
    CHECK(merged.probs[1] == doctest::Approx(0.5));
}

TEST_CASE("two-point embedding reproduces the target law") {
    struct Case {
        DiscreteLaw law;
    };
    const std::vector<DiscreteLaw> laws{
        {{-1.0, 1.0}, {0.5, 0.5}},
        {{-1.0, 2.0}, {2.0 / 3, 1.0 / 3}},
        {{-2.0, -0.5, 0.0, 1.0, 3.0}, {0.1, 0.3, 0.2, 0.25, 0.15}},
    };
    for (auto law : laws) {
        // shift the free atom so the mean is exactly representable as zero
        if (law.atoms.size() == 5) law.atoms[4] = -(law.atoms[0] * 0.1 + law.atoms[1] * 0.3 + law.atoms[3] * 0.25) / 0.15;
        law.validate();
        BrownianPath path(21);
        Rng rng(22);
        std::vector<std::size_t> counts(law.atoms.size(), 0);
        double tsum = 0, tsq = 0;
        const int runs = 100'000;
        for (int i = 0; i < runs; ++i) {
            const auto e = skorokhod_embed(law, path, rng);
            CHECK(e.value == law.atoms[e.atom]);
            ++counts[e.atom];
            tsum += e.time;
            tsq += e.time * e.time;
        }
        CHECK(chi_square_pvalue(law, counts) > 0.01);
        const double mean = tsum / runs, se = std::sqrt((tsq / runs - mean * mean) / runs);
        CHECK(std::abs(mean - law.second_moment()) <= 3 * se);
    }
}

TEST_CASE("degenerate embedding takes no time") {
    BrownianPath path(1);
    Rng rng(2);
    const auto e = skorokhod_embed(DiscreteLaw{{0.0}, {1.0}}, path, rng);
    CHECK(e.time == 0.0);
    CHECK(e.value == 0.0);
    CHECK(path.time() == 0.0);
}

TEST_CASE("martingale approximation for independent blocks") {
    const auto model = MarkovShiftModel::full_shift(2);
    const auto sched = BlockSchedule::build(1.0, 0.1, 5000);
    const BlockMartingale bm(model, {1.0, -1.0}, sched, 3);
    Rng rng(5);
    std::vector<int> x(6000);
    for (auto& s : x) s = int(rng() & 1);
    const auto m = martingale_approx(bm, x, 50);
    for (std::size_t j = 0; j < 50; ++j) {
        CHECK(m.u[j] == 0.0);
        CHECK(m.Y[j] == m.y[j]);
    }
    CHECK(m.reconstruction_error == 0.0);
    CHECK(m.max_conditional_mean == 0.0);
}

TEST_CASE("martingale approximation for the two-state chain") {
    // h = +-1 is an eigenvector with eigenvalue 0.4, so E(h(x_n) | x_q) = 0.4^{n-q} h(x_q)
    const double lam = 0.4;
    const auto model = MarkovShiftModel::two_state(0.3);
    const auto sched = BlockSchedule::build(2.0, 0.5, 3'000'000);
    const int K = 3;
    const BlockMartingale bm(model, {1.0, -1.0}, sched, K);
    for (std::size_t j = 2; j <= 60; ++j) {
        double oracle = 0;
        const auto q = bm.end(j - 1);
        for (int k = 0; k < K; ++k)
            for (auto n = bm.start(j + k); n <= bm.end(j + k); ++n) oracle += std::pow(lam, double(n - q));
        const auto u = bm.u(j);
        CHECK(u(0) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(u(1) == doctest::Approx(-oracle).epsilon(1e-12));
        // first term dominates: lam^{gap}, gap = [ (j-1)^0.5 ] + 1
        const double gap = double(bm.start(j) - q);
        CHECK(gap == double(blocking::floor_pow(j - 1, 0.5) + 1));
        CHECK(std::abs(u(0)) <= std::pow(lam, gap) / (1 - lam) * (1 + 1e-12));
    }
    // stationary L2 norms decay along lam^{[ (j-1)^0.5 ]}
    std::vector<double> norms;
    for (std::size_t j = 2; j <= 200; ++j) norms.push_back(std::abs(bm.u(j)(0)));
    CHECK(norms.back() < 1e-4 * norms.front());

    Rng rng(6);
    std::vector<int> x{model.sample_stationary(rng)};
    while (x.size() < 100'000) x.push_back(model.sample_next(x.back(), rng));
    const std::size_t M = sched.block_of(90'000) - 1;
    const auto m = martingale_approx(bm, x, M);
    double scale = 1;
    for (double y : m.y) scale = std::max(scale, std::abs(y));
    CHECK(m.reconstruction_error <= 1e-15 * scale);
    CHECK(m.max_conditional_mean <= m.tail_bound * (1 + 1e-9));
}

TEST_CASE("required lookahead meets the tolerance") {
    const auto model = MarkovShiftModel::two_state(0.3);
    const auto sched = BlockSchedule::build(1.0, 0.1, 600'000);
    const int K = required_lookahead(model, {1.0, -1.0}, sched, 1e-12, 1000);
    CHECK(K >= 1);
    CHECK(BlockMartingale(model, {1.0, -1.0}, sched, K).max_conditional_mean(1000) <= 1e-12);
    if (K > 1) CHECK(BlockMartingale(model, {1.0, -1.0}, sched, K - 1).max_conditional_mean(1000) > 1e-12);
    try {
        required_lookahead(model, {1.0, -1.0}, sched, 1e-300, 1000, 2);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.required_terms() == 3);
    }
    CHECK_THROWS_AS(BlockMartingale(model, {1.0, 0.0}, sched, 2), InputError);
}

TEST_CASE("coupled run invariants") {
    const auto model = MarkovShiftModel::two_state(0.3);
    const auto sched = BlockSchedule::build(1.0, 0.1, 20'000);
    const auto cps = simulate::geometric_checkpoints(20'000, 10);
    const std::vector<double> values{1.0, -1.0};
    const auto r = coupled_run(model, values, sched, 20'000, cps, 99);
    CHECK(r.sigma == doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(1e-9));
    CHECK(r.K >= 1);
    CHECK(r.block_mismatch <= 1e-9);
    CHECK(r.reconstruction_error <= 1e-9);
    for (double t : r.T) CHECK(t >= 0.0);
    for (std::size_t i = 0; i < cps.size(); ++i) {
        CHECK(r.E[i] == doctest::Approx(r.S[i] - r.W[i]));
        CHECK(r.max_error[i] >= std::abs(r.E[i]) - 1e-12);
        if (i > 0) CHECK(r.max_error[i] >= r.max_error[i - 1]);
    }
    // same seed, same record
    const auto again = coupled_run(model, values, sched, 20'000, cps, 99);
    CHECK(again.S == r.S);
    CHECK(again.W == r.W);

    const auto path = std::filesystem::temp_directory_path() / "asiplab_coupling.csv";
    export_csv(r, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "N,S_N,W_N,E_N");
    std::filesystem::remove(path);

    CHECK_THROWS_AS(coupled_run(model, std::vector<double>{1.0}, sched, 100, {}, 1), InputError);
    CHECK_THROWS_AS(coupled_run(model, std::vector<double>{1.0, 1.0}, sched, 100, {}, 1), InputError);
}

TEST_CASE("coupled sums have the law of direct simulation") {
    // unit long blocks: the classical Skorokhod coupling of a simple random walk
    const auto model = MarkovShiftModel::full_shift(2);
    const auto sched = BlockSchedule::build(1e-3, 1e-4, 1000);
    REQUIRE(sched.long_size(5) == 1);
    const std::vector<std::uint64_t> cps{1000};
    const std::vector<double> values{1.0, -1.0};
    const auto recs = coupled_ensemble(model, values, sched, 1000, cps, 10'000, 7, 1);
    std::vector<double> coupled, direct;
    for (const auto& r : recs) coupled.push_back(r.S[0]);
    Rng rng(8);
    for (int k = 0; k < 100'000; ++k) {
        int s = 0;
        for (int n = 0; n < 1000; ++n) s += (rng() & 1) ? 1 : -1;
        direct.push_back(s);
    }
    CHECK(ks(coupled, direct) <= 0.02);
}
