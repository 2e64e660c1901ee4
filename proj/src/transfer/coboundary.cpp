#include "asiplab/transfer/coboundary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asiplab/common/error.hpp"

namespace asiplab::transfer {

namespace {

double sup_norm(const CylinderFunction& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

CoboundaryResult coboundary_solve(const TransferOperator& op, const CylinderFunction& phi,
                                  const CoboundaryOptions& options) {
    const auto& space = op.space();
    if (phi.depth != space.depth()) throw InputError("observable depth does not match the operator");
    const double phi_sup = sup_norm(phi);
    for (double mean : integrate(space, phi))
        if (std::abs(mean) > 1e-12 * (1.0 + phi_sup)) throw InputError("coboundary solve needs a mean-zero observable");

    const double gap = eigen_gap(op);
    if (!(gap > 0.0)) throw SpectralDegeneracy("transfer operator has no spectral gap");
    std::int64_t terms = options.terms;
    if (terms < 0) {
        if (gap >= 1.0 - 1e-12) {
            terms = space.depth();  // L is nilpotent on mean-zero depth-k functions
        } else {
            terms = static_cast<std::int64_t>(std::ceil(std::log(options.tolerance) / std::log(1.0 - gap)));
        }
        terms = std::max<std::int64_t>(terms, 1);
    }

    CoboundaryResult out;
    out.terms = terms;
    CylinderFunction power = phi;  // L^j phi
    CylinderFunction chi = phi;
    std::fill(chi.values.begin(), chi.values.end(), 0.0);
    for (std::int64_t j = 1; j <= terms; ++j) {
        power = op.apply(power);
        for (std::size_t i = 0; i < chi.values.size(); ++i) chi.values[i] += power.values[i];
    }
    CylinderFunction next = op.apply(power);  // L^{J+1} phi = L psi
    double residual = sup_norm(next);
    if (residual > options.tolerance * std::max(1.0, phi_sup)) {
        std::int64_t required = terms;
        while (residual > options.tolerance * std::max(1.0, phi_sup) && required < options.max_terms) {
            next = op.apply(next);
            residual = sup_norm(next);
            ++required;
        }
        throw TruncationError("coboundary series needs " + std::to_string(required) + " terms (got " +
                                  std::to_string(terms) + ")",
                              required);
    }
    out.tail_bound = gap < 1.0 ? residual * (1.0 - gap) / gap : 0.0;
    out.chi = chi;

    // psi(w_0..w_k) = phi(w_0..w_{k-1}) - chi(w_1..w_k) + chi(w_0..w_{k-1})
    out.psi_space = std::make_shared<const CylinderSpace>(space.model(), space.depth() + 1);
    const auto& fine = *out.psi_space;
    const int n = space.alphabet();
    std::uint64_t top = 1;
    for (int i = 0; i < space.depth(); ++i) top *= static_cast<std::uint64_t>(n);
    const int d = phi.dim;
    out.psi.depth = fine.depth();
    out.psi.dim = d;
    out.psi.values.resize(fine.size() * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const std::uint64_t code = fine.code(i);
        const auto head = static_cast<std::size_t>(space.index_of_code(code / static_cast<std::uint64_t>(n)));
        const auto tail = static_cast<std::size_t>(space.index_of_code(code % top));
        for (int c = 0; c < d; ++c) out.psi(i, c) = phi(head, c) - chi(tail, c) + chi(head, c);
    }

    // checks on the finer space
    double id_res = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const std::uint64_t code = fine.code(i);
        const auto head = static_cast<std::size_t>(space.index_of_code(code / static_cast<std::uint64_t>(n)));
        const auto tail = static_cast<std::size_t>(space.index_of_code(code % top));
        for (int c = 0; c < d; ++c)
            id_res = std::max(id_res, std::abs(phi(head, c) - out.psi(i, c) - chi(tail, c) + chi(head, c)));
    }
    out.identity_residual = id_res;
    const TransferOperator fine_op(out.psi_space);
    out.l_psi_norm = sup_norm(fine_op.apply(out.psi));

    out.sigma = Eigen::MatrixXd::Zero(d, d);
    const auto& m = fine.measure();
    for (std::size_t i = 0; i < fine.size(); ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) out.sigma(a, b) += m[i] * out.psi(i, a) * out.psi(i, b);
    return out;
}

}  // namespace asiplab::transfer
