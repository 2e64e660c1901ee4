#include "asiplab/stats/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asiplab/common/error.hpp"

namespace asiplab::stats {

std::size_t checkpoint_index(const simulate::EnsembleResult& ensemble, std::uint64_t N) {
    const auto& grid = ensemble.checkpoints();
    auto it = std::lower_bound(grid.begin(), grid.end(), N);
    if (it == grid.end() || *it != N) throw InputError("checkpoint N = " + std::to_string(N) + " is not recorded");
    return static_cast<std::size_t>(it - grid.begin());
}

CovarianceEstimate empirical_sigma(std::span<const double> samples, int dim, std::uint64_t N) {
    if (dim < 1 || samples.size() % static_cast<std::size_t>(dim) != 0)
        throw InputError("sample matrix does not match the dimension");
    if (N == 0) throw InputError("N must be positive");
    const std::size_t K = samples.size() / static_cast<std::size_t>(dim);
    if (K < 30) throw InputError("empirical_sigma needs at least 30 trajectories, got " + std::to_string(K));

    const double inv_n = 1.0 / static_cast<double>(N);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> S(
        samples.data(), static_cast<Eigen::Index>(K), dim);
    CovarianceEstimate est;
    est.N = N;
    est.K = K;
    est.sigma_hat = (S.transpose() * S) * (inv_n / static_cast<double>(K));

    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t k = 0; k < K; ++k) {
        Eigen::VectorXd s = S.row(static_cast<Eigen::Index>(k)).transpose();
        Eigen::MatrixXd x = s * s.transpose() * inv_n - est.sigma_hat;
        second += x.cwiseProduct(x);
    }
    est.stderr_ = (second / static_cast<double>(K - 1) / static_cast<double>(K)).cwiseSqrt();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.sigma_hat);
    const auto& ev = eig.eigenvalues();
    est.min_eigenvalue = ev(0);
    est.condition_number = ev(0) > 0.0 ? ev(dim - 1) / ev(0) : std::numeric_limits<double>::infinity();
    Eigen::VectorXd v = eig.eigenvectors().col(0);
    Eigen::VectorXd proj = S * v;
    double var = 0.0;
    for (Eigen::Index k = 0; k < proj.size(); ++k) {
        double x = proj(k) * proj(k) * inv_n - est.min_eigenvalue;
        var += x * x;
    }
    est.min_eigenvalue_stderr = std::sqrt(var / static_cast<double>(K - 1) / static_cast<double>(K));
    est.nonsingular = est.min_eigenvalue > 3.0 * est.min_eigenvalue_stderr;
    return est;
}

CovarianceEstimate empirical_sigma(const simulate::EnsembleResult& ensemble, std::uint64_t N) {
    auto col = ensemble.column(checkpoint_index(ensemble, N));
    return empirical_sigma(col, ensemble.dim(), N);
}

}  // namespace asiplab::stats
