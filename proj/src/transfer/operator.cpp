#include "asiplab/transfer/operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "asiplab/common/error.hpp"

namespace asiplab::transfer {

TransferOperator::TransferOperator(std::shared_ptr<const CylinderSpace> space) : space_(std::move(space)) {
    const auto& s = *space_;
    const auto& model = s.model();
    const auto& p = model.transition();
    const auto& pi = model.stationary();
    const int n = s.alphabet();
    std::uint64_t top = 1;  // n^{k-1}: weight of the leading digit
    for (int i = 1; i < s.depth(); ++i) top *= static_cast<std::uint64_t>(n);

    row_start_.reserve(s.size() + 1);
    row_start_.push_back(0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::uint64_t code = s.code(i);
        const int w0 = static_cast<int>(code / top);
        const std::uint64_t head = code / static_cast<std::uint64_t>(n);  // w_0 .. w_{k-2}
        for (int a = 0; a < n; ++a) {
            const double t = p(a, w0);
            if (t <= 0.0) continue;
            const std::int64_t j = s.index_of_code(static_cast<std::uint64_t>(a) * top + head);
            if (j < 0) continue;
            col_.push_back(static_cast<std::size_t>(j));
            weight_.push_back(pi(a) * t / pi(w0));
        }
        row_start_.push_back(col_.size());
    }
}

TransferOperator TransferOperator::build(const systems::MarkovShiftModel& model, int depth) {
    return TransferOperator(std::make_shared<const CylinderSpace>(model, depth));
}

template <class Vec>
Vec TransferOperator::apply_impl(const Vec& f) const {
    if (static_cast<std::size_t>(f.size()) != size()) throw InputError("transfer operator applied to wrong-size vector");
    Vec out(f.size());
    for (std::size_t i = 0; i + 1 < row_start_.size(); ++i) {
        typename Vec::Scalar acc(0);
        for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) acc += weight_[e] * f(static_cast<Eigen::Index>(col_[e]));
        out(static_cast<Eigen::Index>(i)) = acc;
    }
    return out;
}

Eigen::VectorXd TransferOperator::apply(const Eigen::VectorXd& f) const { return apply_impl(f); }
Eigen::VectorXcd TransferOperator::apply(const Eigen::VectorXcd& f) const { return apply_impl(f); }

CylinderFunction TransferOperator::apply(const CylinderFunction& f) const {
    if (f.depth != space_->depth()) throw InputError("cylinder function depth does not match the operator");
    CylinderFunction g = f;
    for (int c = 0; c < f.dim; ++c) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = f(i, c);
        const Eigen::VectorXd w = apply(v);
        for (std::size_t i = 0; i < size(); ++i) g(i, c) = w(static_cast<Eigen::Index>(i));
    }
    return g;
}

Eigen::MatrixXd TransferOperator::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i + 1 < row_start_.size(); ++i)
        for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_[e])) += weight_[e];
    return m;
}

void TransferOperator::export_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    auto label = [&](std::size_t i) {
        std::string s;
        for (int sym : space_->word(i)) s += std::to_string(sym) + (space_->alphabet() > 10 ? "." : "");
        return s;
    };
    out << "word";
    for (std::size_t j = 0; j < size(); ++j) out << ',' << label(j);
    out << '\n';
    out.precision(17);
    const Eigen::MatrixXd m = dense();
    for (std::size_t i = 0; i < size(); ++i) {
        out << label(i);
        for (std::size_t j = 0; j < size(); ++j) out << ',' << m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

Eigen::VectorXcd twist_phases(const CylinderFunction& phi, std::span<const double> u) {
    if (static_cast<int>(u.size()) != phi.dim) throw InputError("twist parameter dimension does not match observable");
    const std::size_t n = phi.values.size() / static_cast<std::size_t>(phi.dim);
    Eigen::VectorXcd ph(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double a = 0.0;
        for (int c = 0; c < phi.dim; ++c) a += u[static_cast<std::size_t>(c)] * phi(i, c);
        ph(static_cast<Eigen::Index>(i)) = std::polar(1.0, a);
    }
    return ph;
}

TwistedEigen twisted_eigenvalue(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                                const TwistOptions& options) {
    if (phi.depth != op.space().depth()) throw InputError("observable depth does not match the operator");
    const Eigen::VectorXcd phases = twist_phases(phi, u);
    const auto& m = op.space().measure();
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::VectorXcd mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = m[static_cast<std::size_t>(i)];

    // lambda_n = <m, L_u v_n> / <m, v_n>; the constant start vector has full
    // weight on the leading eigendirection near u = 0.
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    std::complex<double> lambda(1.0, 0.0), previous(0.0, 0.0);
    double last_change = 1.0;
    int stalled = 0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const std::complex<double> before = mu.dot(v);  // Eigen's dot conjugates the first argument (real here)
        Eigen::VectorXcd w = op.apply(Eigen::VectorXcd(phases.cwiseProduct(v)));
        const std::complex<double> after = mu.dot(w);
        if (std::abs(before) == 0.0) throw RegimeExceeded("twisted power iteration lost the leading direction");
        lambda = after / before;
        const double change = std::abs(lambda - previous);
        const double scale = w.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !std::isfinite(scale)) throw RegimeExceeded("twisted operator annihilated the iterate");
        v = w / scale;
        const double scale_tol = options.tolerance * std::max(1.0, std::abs(lambda));
        // accept at the tolerance, or once rounding noise stops further progress
        const bool at_floor = it > 100 && change < 1e3 * scale_tol && change >= last_change;
        if ((change <= scale_tol && it > 2) || at_floor) {
            TwistedEigen r;
            r.eigenvalue = lambda;
            r.pressure = std::log(lambda);
            r.iterations = it;
            return r;
        }
        // convergence ratio ~ |lambda_2 / lambda_1|; a ratio near 1 means the gap closed
        if (it > 50 && change > 0.0 && last_change > 0.0 && change / last_change > 1.0 - options.min_separation) {
            if (++stalled > 200) throw RegimeExceeded("leading twisted eigenvalue is not isolated at this u");
        } else {
            stalled = 0;
        }
        last_change = change;
        previous = lambda;
    }
    throw RegimeExceeded("twisted power iteration did not converge");
}

double eigen_gap(const TransferOperator& op) {
    const auto n = static_cast<Eigen::Index>(op.size());
    if (n == 1) return 1.0;
    if (n <= 400) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(op.dense(), false);
        std::vector<double> mods;
        for (Eigen::Index i = 0; i < n; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
        std::sort(mods.begin(), mods.end(), std::greater<>());
        return 1.0 - mods[1];
    }
    // Growth of L^j on a generic mean-zero function.
    const auto& m = op.space().measure();
    Eigen::VectorXd v(n);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index i = 0; i < n; ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v(i) = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
    }
    auto project = [&](Eigen::VectorXd& f) {
        double mean = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) mean += m[static_cast<std::size_t>(i)] * f(i);
        f.array() -= mean;
    };
    project(v);
    v /= v.cwiseAbs().maxCoeff();
    constexpr int kWarm = 50, kSpan = 200;
    double log_growth = 0.0;
    for (int j = 0; j < kWarm + kSpan; ++j) {
        v = op.apply(v);
        project(v);
        const double s = v.cwiseAbs().maxCoeff();
        if (s < 1e-12) return 1.0;  // nilpotent on mean-zero functions (up to rounding)
        if (j >= kWarm) log_growth += std::log(s);
        v /= s;
    }
    return 1.0 - std::min(1.0, std::exp(log_growth / kSpan));
}

std::complex<double> char_fn_exact(const TransferOperator& op, const CylinderFunction& phi, std::span<const double> u,
                                   std::uint64_t n) {
    if (n == 0) return {1.0, 0.0};
    std::vector<double> scaled(u.begin(), u.end());
    for (auto& x : scaled) x /= std::sqrt(static_cast<double>(n));
    const Eigen::VectorXcd phases = twist_phases(phi, scaled);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(op.size()));
    for (std::uint64_t j = 0; j < n; ++j) v = op.apply(Eigen::VectorXcd(phases.cwiseProduct(v)));
    std::complex<double> total(0.0, 0.0);
    const auto& m = op.space().measure();
    for (std::size_t i = 0; i < op.size(); ++i) total += m[i] * v(static_cast<Eigen::Index>(i));
    return total;
}

}  // namespace asiplab::transfer
