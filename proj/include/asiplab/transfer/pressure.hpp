#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "asiplab/transfer/operator.hpp"

namespace asiplab::transfer {

struct PressureOptions {
    /// Stencil step is h0 * gap / max|phi|.
    double h0 = 1e-3;
    TwistOptions twist;
};

struct PressureExpansion {
    Eigen::MatrixXd sigma;  ///< minus the Hessian of Re P at 0
    Eigen::VectorXd p3;     ///< P_3 along each coordinate direction: Im P(t e_i) ~ -P_3 t^3
    double eigen_gap = 0.0;
    double step = 0.0;
};

/// P(u) = log of the leading eigenvalue of L_u for the centred observable.
std::complex<double> pressure(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                              const TwistOptions& options = {});

/// Covariance from the second-order term of the pressure, using the
/// five-point central stencil (fourth-order accurate) on each coordinate
/// axis and on the pairwise diagonals.  The observable is centred first.
PressureExpansion sigma_from_pressure(const TransferOperator& op, const CylinderFunction& phi,
                                      const PressureOptions& options = {});

}  // namespace asiplab::transfer
