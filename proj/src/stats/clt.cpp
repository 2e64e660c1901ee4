#include "asiplab/stats/clt.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"

namespace asiplab::stats {

namespace {

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw InputError("whitening: Sigma is not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    if (L.diagonal().minCoeff() <= 1e-300) throw InputError("whitening: Sigma is singular");
    return L;
}

double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Sum over i < j of |z_i - z_j|.
double pairwise_sum(const RowMatrix& z) {
    const Eigen::Index n = z.rows(), d = z.cols();
    if (d == 1) {
        std::vector<double> v(z.data(), z.data() + n);
        std::sort(v.begin(), v.end());
        long double s = 0.0L;
        for (Eigen::Index k = 0; k < n; ++k) s += static_cast<long double>(v[k]) * (2.0L * k - n + 1);
        return static_cast<double>(s);
    }
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) row += (z.row(i) - z.row(j)).norm();
        s += row;
    }
    return static_cast<double>(s);
}

RowMatrix whiten_estimated(const RowMatrix& x) {
    Eigen::MatrixXd sigma = (x.transpose() * x) / static_cast<double>(x.rows());
    Eigen::MatrixXd L = cholesky_factor(sigma);
    return L.triangularView<Eigen::Lower>().solve(x.transpose()).transpose();
}

}  // namespace

RowMatrix whiten(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != dim || sigma.cols() != dim) throw InputError("Sigma does not match the sample dimension");
    if (samples.size() % static_cast<std::size_t>(dim) != 0) throw InputError("sample matrix is ragged");
    Eigen::MatrixXd L = cholesky_factor(sigma);
    Eigen::Map<const RowMatrix> S(samples.data(), static_cast<Eigen::Index>(samples.size() / dim), dim);
    RowMatrix z = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
    return z / std::sqrt(static_cast<double>(N));
}

KsResult ks_normal(std::span<const double> z) {
    if (z.empty()) throw InputError("ks_normal: empty sample");
    std::vector<double> v(z.begin(), z.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    boost::math::normal_distribution<double> nd;
    double D = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double F = boost::math::cdf(nd, v[i]);
        D = std::max({D, (i + 1) / n - F, F - i / n});
    }
    double sq = std::sqrt(n);
    return {D, kolmogorov_q((sq + 0.12 + 0.11 / sq) * D)};
}

double expected_normal_distance(int d, double r) {
    if (d == 1) {
        boost::math::normal_distribution<double> nd;
        return 2.0 * boost::math::pdf(nd, r) + r * (2.0 * boost::math::cdf(nd, r) - 1.0);
    }
    const double x = 0.5 * r * r;
    if (d == 2) {
        // 1F1(-1/2; 1; -x) = e^{-x/2} ((1 + x) I_0(x/2) + x I_1(x/2))
        double h = x / 2.0;
        double i0 = boost::math::cyl_bessel_i(0, h), i1 = boost::math::cyl_bessel_i(1, h);
        return std::sqrt(M_PI / 2.0) * std::exp(-h) * ((1.0 + x) * i0 + x * i1);
    }
    double c = std::sqrt(2.0) * std::exp(boost::math::lgamma((d + 1) / 2.0) - boost::math::lgamma(d / 2.0));
    return c * boost::math::hypergeometric_1F1(-0.5, d / 2.0, -x);
}

double energy_statistic(const RowMatrix& z) {
    const Eigen::Index n = z.rows();
    const int d = static_cast<int>(z.cols());
    if (n < 2) throw InputError("energy_statistic needs at least two samples");
    long double cross = 0.0L;
    for (Eigen::Index i = 0; i < n; ++i) cross += expected_normal_distance(d, z.row(i).norm());
    const double ezz = 2.0 * std::exp(boost::math::lgamma((d + 1) / 2.0) - boost::math::lgamma(d / 2.0));
    const double nn = static_cast<double>(n);
    double within = 2.0 * pairwise_sum(z) / (nn * nn);
    return nn * (2.0 * static_cast<double>(cross) / nn - ezz - within);
}

CltResult clt_test(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma,
                   const CltOptions& options) {
    if (options.bootstrap < 1) throw InputError("clt_test needs at least one bootstrap replicate");
    RowMatrix z = whiten(samples, dim, N, sigma);
    CltResult res;
    for (int c = 0; c < dim; ++c) {
        std::vector<double> col(static_cast<std::size_t>(z.rows()));
        for (Eigen::Index k = 0; k < z.rows(); ++k) col[k] = z(k, c);
        res.ks.push_back(ks_normal(col));
        res.max_ks = std::max(res.max_ks, res.ks.back().statistic);
    }
    res.energy = energy_statistic(z);

    const Eigen::Index n = z.rows();
    res.bootstrap.assign(static_cast<std::size_t>(options.bootstrap), 0.0);
    auto replicate = [&](std::size_t b) {
        Rng rng(derive_seed(options.seed, b));
        NormalSampler normal;
        RowMatrix x(n, dim);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int c = 0; c < dim; ++c) x(i, c) = normal(rng);
        res.bootstrap[b] = energy_statistic(options.sigma_estimated ? whiten_estimated(x) : x);
    };
    const unsigned workers = std::max(1u, options.workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < res.bootstrap.size(); b += workers) replicate(b);
            });
    }
    auto exceed = std::count_if(res.bootstrap.begin(), res.bootstrap.end(), [&](double e) { return e >= res.energy; });
    res.energy_p = (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(options.bootstrap));

    Verdict& v = res.verdict;
    v.test = "clt";
    v.statistic = res.energy;
    v.threshold = options.alpha;
    v.status = res.energy_p > options.alpha ? Status::pass : Status::fail;
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : res.ks) ks.push_back({{"D", k.statistic}, {"p", k.p_value}});
    v.details = {{"energy_p", res.energy_p}, {"ks", ks}, {"max_ks", res.max_ks}, {"N", N},
                 {"K", static_cast<std::uint64_t>(n)}, {"bootstrap", options.bootstrap},
                 {"sigma_estimated", options.sigma_estimated}};
    return res;
}

}  // namespace asiplab::stats
