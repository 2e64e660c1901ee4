#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "asiplab/common/error.hpp"
#include "asiplab/transfer/coboundary.hpp"
#include "asiplab/transfer/mixing.hpp"
#include "asiplab/transfer/pressure.hpp"
#include "doctest.h"

using namespace asiplab;
using namespace asiplab::transfer;
using systems::MarkovShiftModel;

namespace {

MarkovShiftModel three_state() {
    Eigen::MatrixXd p(3, 3);
    p << 0.5, 0.5, 0.0, 0.2, 0.3, 0.5, 0.6, 0.0, 0.4;
    return MarkovShiftModel(p);
}

CylinderFunction pm1(const CylinderSpace& s) {
    return tabulate(s, 1, [](std::span<const int> w, std::span<double> out) { out[0] = w[0] == 0 ? 1.0 : -1.0; });
}

}  // namespace

TEST_CASE("cylinder space enumerates admissible words") {
    const auto m = three_state();
    const CylinderSpace s(m, 3);
    // admissible 3-words = sum of entries of A^2 where A is the 0/1 pattern
    Eigen::MatrixXd a = (m.transition().array() > 0).cast<double>();
    CHECK(s.size() == static_cast<std::size_t>((a * a).sum()));
    double total = 0.0;
    for (double x : s.measure()) total += x;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<int> bad{0, 2, 0};
    CHECK(s.index_of(bad) == -1);
    std::vector<int> good{0, 1, 2};
    CHECK(s.word(static_cast<std::size_t>(s.index_of(good))) == good);
    CHECK_THROWS_AS(CylinderSpace(MarkovShiftModel::full_shift(2), 25), InputError);
}

TEST_CASE("transfer matrix basics") {
    const auto full = MarkovShiftModel::full_shift(2);
    const auto op = TransferOperator::build(full, 1);
    const auto l_phi = op.apply(pm1(op.space()));
    CHECK(l_phi.values[0] == 0.0);
    CHECK(l_phi.values[1] == 0.0);

    for (int k = 1; k <= 4; ++k) {
        const auto op3 = TransferOperator::build(three_state(), k);
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op3.size()));
        CHECK((op3.apply(one) - one).cwiseAbs().maxCoeff() < 1e-14);
    }

    const auto two = TransferOperator::build(MarkovShiftModel::two_state(0.3), 1);
    Eigen::EigenSolver<Eigen::MatrixXd> es(two.dense());
    std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::sort(ev.begin(), ev.end());
    CHECK(ev[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eigen_gap(two) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("duality and integral preservation") {
    const auto m = three_state();
    const int k = 3;
    const auto op = TransferOperator::build(m, k);
    const auto& s = op.space();
    const CylinderSpace shorter(m, k - 1);
    for (std::size_t u = 0; u < s.size(); ++u) {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
        phi(static_cast<Eigen::Index>(u)) = 1.0;
        const Eigen::VectorXd lphi = op.apply(phi);
        double integral = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) integral += s.measure()[i] * lphi(static_cast<Eigen::Index>(i));
        CHECK(std::abs(integral - s.measure()[u]) < 1e-15);
        const auto uw = s.word(u);
        for (std::size_t v = 0; v < shorter.size(); ++v) {
            const auto vw = shorter.word(v);
            // <L phi, psi> with psi the indicator of [v] (depends on w_0..w_{k-2})
            double lhs = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const auto w = s.word(i);
                if (std::equal(vw.begin(), vw.end(), w.begin())) lhs += s.measure()[i] * lphi(static_cast<Eigen::Index>(i));
            }
            // <phi, psi o F> = m([u]) if u_1..u_{k-1} = v
            const double rhs = std::equal(vw.begin(), vw.end(), uw.begin() + 1) ? s.measure()[u] : 0.0;
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("twisted eigenvalue") {
    const auto op = TransferOperator::build(MarkovShiftModel::full_shift(2), 1);
    const auto phi = pm1(op.space());
    std::vector<double> zero{0.0};
    const auto at0 = twisted_eigenvalue(op, phi, zero);
    CHECK(std::abs(at0.eigenvalue - 1.0) < 1e-15);
    CHECK(std::abs(at0.pressure) < 1e-15);
    for (double t : {0.01, 0.1, 0.5, 1.0}) {
        std::vector<double> u{t};
        CHECK(std::abs(twisted_eigenvalue(op, phi, u).eigenvalue - std::cos(t)) < 1e-13);
    }
    // quadratic fit of -2 Re P(t) / t^2 -> sigma^2 = 1
    std::vector<double> ts, ys;
    for (double t = 0.01; t <= 0.1; t += 0.01) {
        std::vector<double> u{t};
        ts.push_back(t * t);
        ys.push_back(-2.0 * twisted_eigenvalue(op, phi, u).pressure.real() / (t * t));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mx += ts[i] / ts.size();
        my += ys[i] / ys.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxy += (ts[i] - mx) * (ys[i] - my);
        sxx += (ts[i] - mx) * (ts[i] - mx);
    }
    CHECK(my - sxy / sxx * mx == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sigma from pressure") {
    SUBCASE("two-state chain") {
        const auto op = TransferOperator::build(MarkovShiftModel::two_state(0.3), 1);
        const auto pe = sigma_from_pressure(op, pm1(op.space()));
        CHECK(std::abs(pe.sigma(0, 0) - 7.0 / 3.0) < 1e-6);
        CHECK(pe.eigen_gap == doctest::Approx(0.6));
        CHECK(std::abs(pe.p3(0)) < 1e-4);  // symmetric chain: odd cumulants vanish
    }
    SUBCASE("independent coordinates on the full 4-shift") {
        const auto op = TransferOperator::build(MarkovShiftModel::full_shift(4), 1);
        const auto phi = tabulate(op.space(), 2, [](std::span<const int> w, std::span<double> out) {
            out[0] = (w[0] & 1) ? 1.0 : -1.0;
            out[1] = (w[0] & 2) ? 1.0 : -1.0;
        });
        const auto pe = sigma_from_pressure(op, phi);
        CHECK((pe.sigma - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-6);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pe.sigma);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
    SUBCASE("doubling map, depth 12") {
        const auto op = TransferOperator::build(MarkovShiftModel::full_shift(2), 12);
        const auto pe = sigma_from_pressure(op, dyadic_cos2pi(op.space()));
        CHECK(std::abs(pe.sigma(0, 0) - 0.5) < 0.01);
        CHECK(pe.eigen_gap > 0.0);
    }
    SUBCASE("correlated pair on a three-state chain is symmetric PSD") {
        const auto op = TransferOperator::build(three_state(), 2);
        const auto phi = tabulate(op.space(), 2, [](std::span<const int> w, std::span<double> out) {
            out[0] = w[0] + 0.5 * w[1];
            out[1] = w[0] == 2 ? 1.0 : 0.0;
        });
        const auto pe = sigma_from_pressure(op, phi);
        CHECK(std::abs(pe.sigma(0, 1) - pe.sigma(1, 0)) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pe.sigma);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
        const auto cb = coboundary_solve(op, centred(op.space(), phi));
        CHECK((cb.sigma - pe.sigma).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("coboundary decomposition") {
    SUBCASE("L phi = 0 already") {
        const auto op = TransferOperator::build(MarkovShiftModel::full_shift(2), 1);
        const auto cb = coboundary_solve(op, pm1(op.space()));
        for (double v : cb.chi.values) CHECK(v == 0.0);
        CHECK(cb.sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t i = 0; i < cb.psi_space->size(); ++i)
            CHECK(cb.psi(i) == (cb.psi_space->symbol(i, 0) == 0 ? 1.0 : -1.0));
    }
    SUBCASE("two-state chain") {
        const auto op = TransferOperator::build(MarkovShiftModel::two_state(0.3), 1);
        const auto cb = coboundary_solve(op, pm1(op.space()));
        CHECK(cb.l_psi_norm <= 1e-10);
        CHECK(std::abs(cb.sigma(0, 0) - 7.0 / 3.0) < 1e-6);
        CHECK(cb.identity_residual < 1e-12);
        // chi = sum_j L^j phi = (0.4 / 0.6) phi for this chain
        CHECK(cb.chi.values[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    }
    SUBCASE("insufficient truncation reports the needed J") {
        const auto op = TransferOperator::build(MarkovShiftModel::two_state(0.3), 1);
        CoboundaryOptions opt;
        opt.terms = 2;
        try {
            coboundary_solve(op, pm1(op.space()), opt);
            FAIL("expected TruncationError");
        } catch (const TruncationError& e) {
            // 0.4^{J+1} <= 1e-12 first at J = 30
            CHECK(e.required_terms() == 30);
        }
    }
    SUBCASE("mean zero is required") {
        const auto op = TransferOperator::build(MarkovShiftModel::two_state(0.3), 1);
        auto phi = pm1(op.space());
        phi.values[0] += 1.0;
        CHECK_THROWS_AS(coboundary_solve(op, phi), InputError);
    }
}

TEST_CASE("cylinder mixing") {
    const auto full = MarkovShiftModel::full_shift(2);
    std::vector<int> a{0, 1}, b{1, 1, 0};
    for (std::uint64_t n : {0, 1, 7}) CHECK(cylinder_mixing(full, a, b, n).difference == 0.0);

    const auto two = MarkovShiftModel::two_state(0.3);
    std::vector<int> zero{0};
    const auto mm = cylinder_mixing(two, zero, zero, 1);
    CHECK(mm.difference == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(mm.joint == doctest::Approx(0.29).epsilon(1e-12));

    std::vector<std::uint64_t> lags;
    for (std::uint64_t n = 1; n <= 40; ++n) lags.push_back(n);
    const auto fit = fit_mixing(two, zero, zero, lags);
    CHECK(std::abs(fit.tau - 0.4) < 1e-3);
    CHECK(fit.c > 0.0);
    CHECK(fit_mixing(full, a, b, lags).tau == 0.0);

    std::vector<int> bad{0, 0};
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 1.0, 0.5, 0.5;
    CHECK_THROWS_AS(cylinder_mixing(MarkovShiftModel(p), bad, zero, 1), InputError);
}

TEST_CASE("cylinder approximation error") {
    const auto full = MarkovShiftModel::full_shift(2, 0.5);
    const CylinderSpace fine(full, 18);
    // locally constant at depth 5: error vanishes from depth 5 on
    const auto step = tabulate(fine, 1, [](std::span<const int> w, std::span<double> out) {
        out[0] = w[0] + 2.0 * w[4] - 0.3 * w[2];
    });
    for (int k = 5; k <= 8; ++k) CHECK(cylinder_approx_error(fine, step, k, 2.0, 1.0).error < 1e-15);
    CHECK(cylinder_approx_error(fine, step, 4, 2.0, 1.0).error > 0.1);

    const auto cosine = dyadic_cos2pi(fine);
    const double lip = beta_lipschitz(fine, cosine, 0.5);
    CHECK(lip <= 2.0 * std::numbers::pi + 1e-9);
    CHECK(lip > 6.0);
    std::vector<int> ks;
    for (int k = 4; k <= 14; ++k) ks.push_back(k);
    for (double p : {2.0, std::numeric_limits<double>::infinity()}) {
        const auto prof = cylinder_approx_profile(fine, cosine, ks, p);
        for (const auto& e : prof.points) CHECK(e.error <= 2.0 * std::numbers::pi * std::ldexp(1.0, -e.depth));
        CHECK(prof.decay_rate <= 0.5 + 0.02);
        CHECK(prof.decay_rate > 0.45);
    }
}

TEST_CASE("exact characteristic function") {
    const auto op = TransferOperator::build(MarkovShiftModel::full_shift(2), 1);
    const auto phi = pm1(op.space());
    for (std::uint64_t n : {1, 10, 100, 1000}) {
        for (double u : {0.3, 1.0, 2.5}) {
            std::vector<double> uu{u};
            const auto f = char_fn_exact(op, phi, uu, n);
            CHECK(std::abs(f - std::pow(std::cos(u / std::sqrt(double(n))), double(n))) < 1e-12);
        }
    }
}

TEST_CASE("operator CSV export") {
    const auto op = TransferOperator::build(three_state(), 2);
    const auto path = std::filesystem::temp_directory_path() / "asiplab_test_op.csv";
    op.export_csv(path);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(op.size()) + 1);
    std::filesystem::remove(path);
}
