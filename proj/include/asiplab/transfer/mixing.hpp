#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "asiplab/transfer/cylinder.hpp"

namespace asiplab::transfer {

/// Exact correlation of two cylinders separated by N symbols:
/// joint = m(a ∩ F^{-(N+k)} b) with k = |a|.
struct MixingMeasurement {
    double joint = 0.0;
    double product = 0.0;     ///< m(a) m(b)
    double difference = 0.0;  ///< |joint - product|
    double bound = 0.0;       ///< C tau^N m(a) m(b)^{1/2}
    double ratio = 0.0;       ///< difference / bound
};

/// Default tau (negative) is the subleading eigenvalue modulus of P.
/// Throws InputError for inadmissible words.
MixingMeasurement cylinder_mixing(const systems::MarkovShiftModel& model, std::span<const int> a,
                                  std::span<const int> b, std::uint64_t n, double c = 1.0, double tau = -1.0);

struct MixingFit {
    double c = 0.0;
    double tau = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of log(difference / (m(a) m(b)^{1/2})) = log C + N log tau
/// over the lags with a nonzero difference.  All-zero differences give C = tau = 0.
MixingFit fit_mixing(const systems::MarkovShiftModel& model, std::span<const int> a, std::span<const int> b,
                     std::span<const std::uint64_t> lags);

struct ApproxError {
    int depth = 0;
    double error = 0.0;  ///< |phi - E(phi | first k symbols)|_p
    double bound = 0.0;  ///< ||phi||_beta beta^k
};

/// Symbolic Lipschitz seminorm sup_k sup_{|w| = k} osc_[w](phi) / beta^k,
/// read off a function tabulated on a fine space (k = 0 .. fine depth).
double beta_lipschitz(const CylinderSpace& fine, const CylinderFunction& phi, double beta);

/// Error of the depth-k conditional expectation, computed on the finer
/// space; p = infinity gives the sup norm.
ApproxError cylinder_approx_error(const CylinderSpace& fine, const CylinderFunction& phi, int k, double p,
                                  double beta_norm);

struct ApproxProfile {
    std::vector<ApproxError> points;
    double beta_norm = 0.0;
    double decay_rate = 0.0;  ///< exp of the fitted slope of log error against k
};

ApproxProfile cylinder_approx_profile(const CylinderSpace& fine, const CylinderFunction& phi,
                                      std::span<const int> depths, double p);

}  // namespace asiplab::transfer
