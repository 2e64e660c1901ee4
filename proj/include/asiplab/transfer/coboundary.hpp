#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "asiplab/transfer/operator.hpp"

namespace asiplab::transfer {

struct CoboundaryOptions {
    double tolerance = 1e-12;
    /// Number of terms J in chi = sum_{j=1}^J L^j phi; negative means choose
    /// J = ceil(log(tolerance) / log(1 - gap)).
    std::int64_t terms = -1;
    std::int64_t max_terms = 1'000'000;
};

/// phi = psi + chi o F - chi with L psi = L^{J+1} phi (zero up to the tolerance).
/// chi lives on depth k, psi on depth k + 1.
struct CoboundaryResult {
    std::shared_ptr<const CylinderSpace> psi_space;
    CylinderFunction psi;
    CylinderFunction chi;
    std::int64_t terms = 0;
    double l_psi_norm = 0.0;         ///< sup |L psi| measured on depth k + 1
    double tail_bound = 0.0;         ///< |L^{J+1} phi| (1 - g) / g, bound on the dropped tail of chi
    double identity_residual = 0.0;  ///< sup |phi - psi - chi o F + chi|
    Eigen::MatrixXd sigma;           ///< integral of psi psi^T
};

/// Throws InputError for an observable that is not mean zero and
/// TruncationError (with the J needed) when J terms miss the tolerance.
CoboundaryResult coboundary_solve(const TransferOperator& op, const CylinderFunction& phi,
                                  const CoboundaryOptions& options = {});

}  // namespace asiplab::transfer
