#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asiplab/transfer/cylinder.hpp"

namespace asiplab::transfer {

/// Transfer operator of the stationary Markov shift restricted to depth-k
/// cylinder functions, where it acts exactly:
///   (L f)(w) = sum_a  pi_a P(a, w_0) / pi_{w_0} * f(a w_0 ... w_{k-2}).
class TransferOperator {
public:
    explicit TransferOperator(std::shared_ptr<const CylinderSpace> space);
    static TransferOperator build(const systems::MarkovShiftModel& model, int depth);

    const CylinderSpace& space() const noexcept { return *space_; }
    std::shared_ptr<const CylinderSpace> space_ptr() const noexcept { return space_; }
    std::size_t size() const noexcept { return space_->size(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;
    CylinderFunction apply(const CylinderFunction& f) const;
    Eigen::MatrixXd dense() const;

    /// Dense matrix as CSV: a header "word,<w_0>,..." then one row per word.
    void export_csv(const std::filesystem::path& path) const;

private:
    template <class Vec>
    Vec apply_impl(const Vec& f) const;

    std::shared_ptr<const CylinderSpace> space_;
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> col_;
    std::vector<double> weight_;
};

struct TwistOptions {
    int max_iterations = 20000;
    double tolerance = 1e-15;
    /// Leading eigenvalue must dominate the rest by at least this ratio gap;
    /// a smaller separation is reported as RegimeExceeded.
    double min_separation = 1e-3;
};

struct TwistedEigen {
    std::complex<double> eigenvalue;
    std::complex<double> pressure;  ///< log of the eigenvalue, continuous from P(0) = 0
    int iterations = 0;
};

/// e^{i<u, phi>} on each cylinder.
Eigen::VectorXcd twist_phases(const CylinderFunction& phi, std::span<const double> u);

/// Leading eigenvalue of L_u f = L(e^{i<u,phi>} f) by power iteration from
/// the constant function.  Throws RegimeExceeded when the iteration fails
/// to settle (the leading eigenvalue is no longer isolated).
TwistedEigen twisted_eigenvalue(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                                const TwistOptions& options = {});

/// 1 - |lambda_2|, the spectral gap of L.  Dense eigenvalues for small
/// spaces, otherwise the growth rate of L^n on mean-zero functions.
double eigen_gap(const TransferOperator& op);

/// E exp(i <u, S_N> / sqrt(N)) = integral of (L_{u/sqrt N})^N 1.
std::complex<double> char_fn_exact(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                                   std::uint64_t n);

}  // namespace asiplab::transfer
