#include "asiplab/stats/burkholder.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"

namespace asiplab::stats {

std::vector<double> suffix_maxima(std::span<const double> psi, std::span<const std::uint64_t> n_grid) {
    std::vector<double> out;
    out.reserve(n_grid.size());
    // max over l of |S_N - S_{l-1}| needs the range of S_0 .. S_{N-1}.
    double s = 0.0, lo = 0.0, hi = 0.0;
    std::uint64_t k = 0;
    for (std::uint64_t N : n_grid) {
        if (N == 0 || N > psi.size()) throw InputError("grid point beyond the kernel sequence");
        for (; k < N; ++k) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
            s += psi[k];
        }
        out.push_back(std::max(std::abs(s - lo), std::abs(s - hi)));
    }
    return out;
}

BurkholderResult burkholder_check(const KernelSequence& psi, std::span<const std::uint64_t> n_grid,
                                  const BurkholderOptions& options) {
    if (!(options.p > 2.0) || !std::isfinite(options.p)) throw InputError("Burkholder check needs 2 < p < inf");
    if (options.kernel_residual > options.kernel_tolerance)
        throw HypothesisError("observable is not in the kernel of L: |L Psi| = " +
                              std::to_string(options.kernel_residual));
    if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end()))
        throw InputError("N grid must be nonempty and increasing");
    const std::size_t K = options.trajectories, G = n_grid.size();
    if (K == 0) throw InputError("no trajectories");
    std::vector<double> moments(K * G);
    auto run = [&](std::size_t r) {
        auto seq = psi(derive_seed(options.master_seed, r));
        auto m = suffix_maxima(seq, n_grid);
        for (std::size_t g = 0; g < G; ++g) moments[r * G + g] = std::pow(m[g], options.p);
    };
    const unsigned workers = std::max(1u, options.workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < K; r += workers) run(r);
            });
    }
    BurkholderResult res;
    for (std::size_t g = 0; g < G; ++g) {
        long double acc = 0.0L;
        for (std::size_t r = 0; r < K; ++r) acc += moments[r * G + g];
        double norm = std::pow(static_cast<double>(acc / K), 1.0 / options.p);
        res.n.push_back(n_grid[g]);
        res.ratio.push_back(norm / std::sqrt(static_cast<double>(n_grid[g])));
    }
    std::vector<double> ns(res.n.begin(), res.n.end());
    res.fit = coupling::exponent_fit(ns, res.ratio);

    Verdict& v = res.verdict;
    v.test = "burkholder";
    v.statistic = res.fit.all_zero ? 0.0 : res.fit.slope;
    v.ci_low = res.fit.ci_low;
    v.ci_high = res.fit.ci_high;
    v.threshold = options.slope_tolerance;
    v.status = (res.fit.all_zero || std::abs(res.fit.slope) <= options.slope_tolerance) ? Status::pass : Status::fail;
    v.details = {{"p", options.p}, {"trajectories", K}, {"N", res.n}, {"ratio", res.ratio},
                 {"max_ratio", *std::max_element(res.ratio.begin(), res.ratio.end())}};
    return res;
}

std::vector<double> markov_kernel_sequence(const systems::MarkovShiftModel& model,
                                           const transfer::CoboundaryResult& cob, std::uint64_t length,
                                           std::uint64_t seed) {
    const auto& space = *cob.psi_space;
    if (cob.psi.dim != 1) throw InputError("kernel sequence needs a scalar observable");
    const int depth = space.depth();
    const auto n = static_cast<std::uint64_t>(model.alphabet_size());
    std::uint64_t top = 1;
    for (int i = 1; i < depth; ++i) top *= n;

    Rng rng(seed);
    int sym = model.sample_stationary(rng);
    std::uint64_t code = static_cast<std::uint64_t>(sym);
    for (int i = 1; i < depth; ++i) {
        sym = model.sample_next(sym, rng);
        code = code * n + static_cast<std::uint64_t>(sym);
    }
    std::vector<double> out(length);
    for (std::uint64_t t = 0; t < length; ++t) {
        out[t] = cob.psi(static_cast<std::size_t>(space.index_of_code(code)));
        sym = model.sample_next(sym, rng);
        code = (code % top) * n + static_cast<std::uint64_t>(sym);
    }
    return out;
}

}  // namespace asiplab::stats
