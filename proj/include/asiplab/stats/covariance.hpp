#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "asiplab/simulate/ensemble.hpp"

namespace asiplab::stats {

struct CovarianceEstimate {
    Eigen::MatrixXd sigma_hat;
    Eigen::MatrixXd stderr_;  ///< trajectory-wise MC error of each entry
    std::uint64_t N = 0;
    std::size_t K = 0;
    double condition_number = 0.0;
    double min_eigenvalue = 0.0;
    /// MC error of v^T sigma_hat v along the smallest eigenvector v.
    double min_eigenvalue_stderr = 0.0;
    bool nonsingular = false;  ///< min_eigenvalue > 3 * min_eigenvalue_stderr
};

/// sigma_hat = mean over trajectories of S_N S_N^T / N.  `samples` is K x d
/// row-major.  Needs K >= 30.
CovarianceEstimate empirical_sigma(std::span<const double> samples, int dim, std::uint64_t N);

/// Same, reading the checkpoint N of an ensemble; InputError when N is not
/// on the grid.
CovarianceEstimate empirical_sigma(const simulate::EnsembleResult& ensemble, std::uint64_t N);

/// Index of checkpoint N in the ensemble grid; InputError when missing.
std::size_t checkpoint_index(const simulate::EnsembleResult& ensemble, std::uint64_t N);

}  // namespace asiplab::stats
