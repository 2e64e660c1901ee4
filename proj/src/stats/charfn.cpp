#include "asiplab/stats/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "asiplab/common/error.hpp"
#include "asiplab/stats/covariance.hpp"

namespace asiplab::stats {

std::complex<double> empirical_char_fn(std::span<const double> samples, int dim, std::uint64_t N,
                                       std::span<const double> u) {
    if (static_cast<int>(u.size()) != dim) throw InputError("grid point dimension differs from the samples");
    const std::size_t K = samples.size() / static_cast<std::size_t>(dim);
    if (K == 0) throw InputError("empty sample");
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double dot = 0.0;
        for (int c = 0; c < dim; ++c) dot += u[c] * samples[k * dim + c];
        double x = dot * scale;
        re += std::cos(x);
        im += std::sin(x);
    }
    return {re / static_cast<double>(K), im / static_cast<double>(K)};
}

double gaussian_char_fn(const Eigen::MatrixXd& sigma, std::span<const double> u) {
    Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
    return std::exp(-0.5 * v.dot(sigma * v));
}

CharFnPoint char_fn_point(std::span<const double> samples, int dim, std::uint64_t N, const Eigen::MatrixXd& sigma,
                          std::span<const double> grid, double epsilon, const ExactCharFn& exact) {
    if (sigma.rows() != dim || sigma.cols() != dim) throw InputError("Sigma does not match the sample dimension");
    if (grid.empty() || grid.size() % static_cast<std::size_t>(dim) != 0) throw InputError("u grid is empty or ragged");
    const double K = static_cast<double>(samples.size() / static_cast<std::size_t>(dim));
    const double radius = epsilon * std::sqrt(static_cast<double>(N));
    CharFnPoint pt;
    pt.N = N;
    double exact_dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(dim)) {
        auto u = grid.subspan(i, static_cast<std::size_t>(dim));
        double norm = 0.0;
        for (double x : u) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > radius) {
            ++pt.trimmed;
            continue;
        }
        ++pt.grid_used;
        auto f = empirical_char_fn(samples, dim, N, u);
        double g = gaussian_char_fn(sigma, u);
        double dev = std::abs(f - g);
        if (dev > pt.deviation) {
            pt.deviation = dev;
            pt.argmax = norm;
        }
        pt.max_stderr = std::max(pt.max_stderr, std::sqrt(std::max(0.0, 1.0 - std::norm(f)) / K));
        if (exact) exact_dev = std::max(exact_dev, std::abs(exact(u, N) - g));
    }
    if (pt.grid_used == 0) throw InputError("no grid point satisfies |u| <= epsilon sqrt N at N = " + std::to_string(N));
    if (exact) {
        pt.exact = exact_dev;
        pt.matches_exact = std::abs(pt.deviation - exact_dev) <= 3.0 * pt.max_stderr;
    }
    return pt;
}

CharFnResult char_fn_test(const simulate::EnsembleResult& ensemble, const Eigen::MatrixXd& sigma,
                          std::span<const double> grid, std::span<const std::uint64_t> checkpoints, double epsilon,
                          const ExactCharFn& exact, double slack) {
    CharFnResult res;
    const int dim = ensemble.dim();
    std::vector<double> ns, ds, floors;
    for (std::uint64_t N : checkpoints) {
        auto col = ensemble.column(checkpoint_index(ensemble, N));
        auto pt = char_fn_point(col, dim, N, sigma, grid, epsilon, exact);
        if (pt.trimmed > 0)
            res.warnings.push_back("N = " + std::to_string(N) + ": " + std::to_string(pt.trimmed) +
                                   " grid points beyond epsilon sqrt N trimmed");
        ns.push_back(static_cast<double>(N));
        ds.push_back(exact ? *pt.exact : pt.deviation);
        floors.push_back(3.0 * pt.max_stderr);
        res.points.push_back(pt);
    }
    if (!floors.empty()) {
        std::nth_element(floors.begin(), floors.begin() + floors.size() / 2, floors.end());
        res.mc_floor = floors[floors.size() / 2];
    }
    res.fit_on_exact = static_cast<bool>(exact);
    res.fit = coupling::exponent_fit(ns, ds);

    Verdict& v = res.verdict;
    v.test = "char-fn";
    v.statistic = res.fit.slope;
    v.ci_low = res.fit.ci_low;
    v.ci_high = res.fit.ci_high;
    v.threshold = -0.5 + slack;
    bool matches = std::all_of(res.points.begin(), res.points.end(),
                               [](const CharFnPoint& p) { return p.matches_exact.value_or(true); });
    v.status = (res.fit.slope <= v.threshold && matches) ? Status::pass : Status::fail;
    v.details = {{"fit_on_exact", res.fit_on_exact}, {"mc_floor", res.mc_floor}, {"warnings", res.warnings}};
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : res.points) {
        nlohmann::json j = {{"N", p.N}, {"D_N", p.deviation}, {"stderr", p.max_stderr}, {"trimmed", p.trimmed}};
        if (p.exact) j["exact"] = *p.exact;
        if (p.matches_exact) j["matches_exact"] = *p.matches_exact;
        pts.push_back(j);
    }
    v.details["points"] = pts;
    return res;
}

std::vector<double> scalar_grid(double u_max, int count) {
    if (count < 1 || !(u_max > 0.0)) throw InputError("scalar_grid needs count >= 1 and u_max > 0");
    std::vector<double> g;
    for (int i = count; i >= 1; --i) g.push_back(-u_max * i / count);
    for (int i = 1; i <= count; ++i) g.push_back(u_max * i / count);
    return g;
}

void export_csv(const CharFnResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    out << "N,D_N,stderr,exact\n";
    for (const auto& p : result.points) {
        out << p.N << ',' << p.deviation << ',' << p.max_stderr << ',';
        if (p.exact) out << *p.exact;
        out << '\n';
    }
}

}  // namespace asiplab::stats
