#include "asiplab/coupling/coupled_run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"
#include "asiplab/coupling/brownian.hpp"
#include "asiplab/coupling/martingale.hpp"
#include "asiplab/coupling/skorokhod.hpp"
#include "asiplab/transfer/coboundary.hpp"

namespace asiplab::coupling {

namespace {

double asymptotic_sigma(const systems::MarkovShiftModel& model, const std::vector<double>& h) {
    const auto op = transfer::TransferOperator::build(model, 1);
    const auto phi = transfer::tabulate(op.space(), 1, [&](std::span<const int> w, std::span<double> out) {
        out[0] = h[static_cast<std::size_t>(w[0])];
    });
    const auto res = transfer::coboundary_solve(op, phi);
    return std::sqrt(std::max(0.0, res.sigma(0, 0)));
}

struct Prepared {
    std::vector<double> h;
    double sigma = 1.0;
    blocking::BlockSchedule schedule;
    std::size_t blocks = 0;  // blocks run: one past the block holding n_max
    int K = 0;
};

Prepared prepare(const systems::MarkovShiftModel& model, std::span<const double> values,
                 const blocking::BlockSchedule& schedule, std::uint64_t n_max, const CouplingOptions& options) {
    const int n = model.alphabet_size();
    if (static_cast<int>(values.size()) != n) throw InputError("observable needs one value per symbol");
    if (n_max < 1) throw InputError("n_max must be positive");
    if (static_cast<std::size_t>(n) > options.max_atoms)
        throw CoarseningError("one-step law has " + std::to_string(n) + " atoms, budget " +
                              std::to_string(options.max_atoms));
    Prepared p{.h = {values.begin(), values.end()}, .schedule = schedule};
    double mean = 0.0;
    for (int a = 0; a < n; ++a) mean += model.stationary()(a) * values[static_cast<std::size_t>(a)];
    for (auto& v : p.h) v -= mean;
    if (options.normalise) {
        p.sigma = asymptotic_sigma(model, p.h);
        if (!(p.sigma > 1e-12)) throw InputError("observable has zero asymptotic variance");
        for (auto& v : p.h) v /= p.sigma;
    }
    if (p.schedule.boundary(p.schedule.blocks()) < n_max)
        p.schedule = blocking::BlockSchedule::build(schedule.Q(), schedule.alpha(), n_max);
    p.blocks = p.schedule.block_of(n_max) + 1;
    p.schedule = blocking::extend_schedule(p.schedule, p.blocks);
    p.K = options.K > 0 ? options.K
                        : required_lookahead(model, p.h, p.schedule, options.truncation_tolerance, p.blocks);
    return p;
}

}  // namespace

CouplingRecord coupled_run(const systems::MarkovShiftModel& model, std::span<const double> values,
                           const blocking::BlockSchedule& schedule, std::uint64_t n_max,
                           std::span<const std::uint64_t> checkpoints, std::uint64_t seed,
                           const CouplingOptions& options) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        if (checkpoints[i] < 1 || checkpoints[i] > n_max || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw InputError("checkpoints must increase inside [1, n_max]");
    const auto prep = prepare(model, values, schedule, n_max, options);
    const int n = model.alphabet_size();
    const auto& pi = model.stationary();
    const auto& P = model.transition();
    const auto& h = prep.h;
    const auto& sched = prep.schedule;
    const std::size_t M_run = prep.blocks;
    CouplingRecord rec;
    rec.seed = seed;
    rec.sigma = prep.sigma;
    rec.K = prep.K;
    const BlockMartingale bm(model, h, sched, rec.K);

    Rng rng(derive_seed(seed, 0));
    BrownianPath path(derive_seed(seed, 1), n_max, 1.0);
    std::vector<int> x;
    x.reserve(static_cast<std::size_t>(sched.boundary(M_run)));
    std::vector<double> u_vals{0.0};
    std::vector<double> delta(static_cast<std::size_t>(n)), prob(static_cast<std::size_t>(n));
    long double sum_Y = 0.0L;

    for (std::size_t j = 1; x.size() < n_max; ++j) {
        if (j > M_run) throw InputError("schedule exhausted before n_max symbols");
        const std::uint64_t s = bm.start(j), e = bm.end(j);
        const double uj = u_vals.back();
        const Eigen::VectorXd u_next = bm.u(j + 1);
        // V[r] = P^r u_{j+1}, clamped once it has settled
        std::vector<Eigen::VectorXd> V{u_next};
        const double u_scale = std::max(1.0, u_next.cwiseAbs().maxCoeff());
        const auto span_len = static_cast<std::size_t>(e + 2 - x.size());
        while (V.size() <= span_len) {
            Eigen::VectorXd next = P * V.back();
            const bool settled = (next - V.back()).cwiseAbs().maxCoeff() <= 1e-18 * u_scale;
            V.push_back(std::move(next));
            if (settled) break;
        }
        auto future = [&](std::int64_t t, int a) {
            // E(remaining long-block terms + u_{j+1}(x_e) | x_t = a)
            const auto tt = static_cast<std::uint64_t>(t);
            double b = 0.0;
            if (t < static_cast<std::int64_t>(e)) {
                b = bm.G(e - tt)(a);
                if (t + 1 < static_cast<std::int64_t>(s)) b -= bm.G(s - tt - 1)(a);
            }
            const auto r = static_cast<std::size_t>(e - tt);
            return b + V[std::min(r, V.size() - 1)](a);
        };

        long double A = 0.0L;
        double D;
        const auto t0 = static_cast<std::int64_t>(x.size()) - 1;
        if (t0 < 0) {
            // x_{-1} drawn from the stationary law stands in for the missing past
            D = 0.0;
            for (int a = 0; a < n; ++a) {
                double b = bm.G(e + 1)(a) - (s > 0 ? bm.G(s)(a) : 0.0);
                b += V[std::min<std::size_t>(static_cast<std::size_t>(e + 1), V.size() - 1)](a);
                D += pi(a) * b;
            }
        } else {
            D = future(t0, x.back()) - uj;
        }
        double T = 0.0;
        for (auto t = static_cast<std::int64_t>(x.size()); t <= static_cast<std::int64_t>(e); ++t) {
            const bool in_long = t >= static_cast<std::int64_t>(s);
            for (int b = 0; b < n; ++b) {
                prob[static_cast<std::size_t>(b)] = x.empty() ? pi(b) : P(x.back(), b);
                const long double a_next = A + (in_long ? h[static_cast<std::size_t>(b)] : 0.0);
                delta[static_cast<std::size_t>(b)] = static_cast<double>(a_next) + future(t, b) - uj - D;
            }
            const auto law = merge_atoms(delta, prob);
            const auto emb = skorokhod_embed(law, path, rng);
            T += emb.time;
            // pick the symbol among those sharing the embedded atom
            const double atol = 1e-13 * std::max(1.0, std::abs(emb.value));
            std::vector<double> w(static_cast<std::size_t>(n), 0.0);
            for (std::size_t b = 0; b < w.size(); ++b)
                if (std::abs(delta[b] - emb.value) <= atol) w[b] = prob[b];
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            double pick = uniform01(rng) * total;
            int chosen = -1;
            for (std::size_t b = 0; b < w.size(); ++b) {
                if (w[b] <= 0.0) continue;
                chosen = static_cast<int>(b);
                if (pick < w[b]) break;
                pick -= w[b];
            }
            if (chosen < 0) throw Error("embedded value matches no symbol");
            x.push_back(chosen);
            if (in_long) A += h[static_cast<std::size_t>(chosen)];
            D = static_cast<double>(A) + future(t, chosen) - uj;
        }
        const double u_after = u_next(x[e]);
        const double Y = static_cast<double>(A) - uj + u_after;
        u_vals.push_back(u_after);
        rec.T.push_back(T);
        rec.Y.push_back(Y);
        rec.W_block.push_back(path.value());
        sum_Y += Y;
        rec.block_mismatch = std::max(rec.block_mismatch, std::abs(static_cast<double>(sum_Y) - path.value()));
    }
    if (path.time() < static_cast<double>(n_max)) path.advance_to(static_cast<double>(n_max));

    // direct partial sums and the reconstruction through Y, u and short blocks
    std::vector<double> S(n_max + 1, 0.0);
    {
        long double acc = 0.0L;
        for (std::uint64_t i = 0; i < n_max; ++i) {
            acc += h[static_cast<std::size_t>(x[i])];
            S[i + 1] = static_cast<double>(acc);
        }
        long double rebuilt = 0.0L, direct = 0.0L;
        std::uint64_t pos = 0;
        for (std::size_t j = 1; j <= rec.Y.size() && sched.boundary(j) <= x.size(); ++j) {
            rebuilt += static_cast<long double>(rec.Y[j - 1]) + u_vals[j - 1] - u_vals[j];
            for (std::uint64_t i = bm.end(j) + 1; i < sched.boundary(j); ++i) rebuilt += h[static_cast<std::size_t>(x[i])];
            for (; pos < sched.boundary(j); ++pos) direct += h[static_cast<std::size_t>(x[pos])];
            rec.reconstruction_error =
                std::max(rec.reconstruction_error, static_cast<double>(std::abs(rebuilt - direct)));
        }
    }
    const auto& Wn = path.records();
    std::vector<double> clock_prefix(rec.T.size() + 1, 0.0);
    for (std::size_t j = 0; j < rec.T.size(); ++j) clock_prefix[j + 1] = clock_prefix[j] + rec.T[j];

    rec.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    double running = 0.0;
    std::uint64_t upto = 0;
    for (const auto N : checkpoints) {
        for (; upto < N; ++upto) running = std::max(running, std::abs(S[upto + 1] - Wn[upto]));
        rec.S.push_back(S[N]);
        rec.W.push_back(Wn[N - 1]);
        rec.E.push_back(S[N] - Wn[N - 1]);
        rec.max_error.push_back(running);
        rec.clock.push_back(clock_prefix[sched.block_of(N)]);
    }
    return rec;
}

std::vector<CouplingRecord> coupled_ensemble(const systems::MarkovShiftModel& model, std::span<const double> values,
                                             const blocking::BlockSchedule& schedule, std::uint64_t n_max,
                                             std::span<const std::uint64_t> checkpoints, std::size_t runs,
                                             std::uint64_t master_seed, unsigned workers,
                                             const CouplingOptions& options) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(runs, 1)));
    auto opts = options;
    opts.K = prepare(model, values, schedule, n_max, options).K;  // shared by every run
    std::vector<CouplingRecord> out(runs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < runs;) {
                    try {
                        out[i] = coupled_run(model, values, schedule, n_max, checkpoints, derive_seed(master_seed, i), opts);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

CouplingSummary summarise(std::span<const CouplingRecord> records, double fit_lo, double fit_hi) {
    if (records.empty()) throw InputError("no coupling records");
    CouplingSummary out;
    out.runs = records.size();
    out.checkpoints = records.front().checkpoints;
    const std::size_t m = out.checkpoints.size();
    out.mean_max_error.assign(m, 0.0);
    out.mean_clock_drift.assign(m, 0.0);
    for (const auto& r : records) {
        if (r.checkpoints != out.checkpoints) throw InputError("coupling records use different checkpoints");
        for (std::size_t i = 0; i < m; ++i) {
            out.mean_max_error[i] += r.max_error[i];
            out.mean_clock_drift[i] += std::abs(r.clock[i] - static_cast<double>(r.checkpoints[i]));
        }
        out.max_block_mismatch = std::max(out.max_block_mismatch, r.block_mismatch);
    }
    for (std::size_t i = 0; i < m; ++i) {
        out.mean_max_error[i] /= static_cast<double>(records.size());
        out.mean_clock_drift[i] /= static_cast<double>(records.size());
    }
    const std::vector<double> n(out.checkpoints.begin(), out.checkpoints.end());
    out.error_fit = exponent_fit(n, out.mean_max_error, {fit_lo, fit_hi});
    out.clock_fit = exponent_fit(n, out.mean_clock_drift, {fit_lo, fit_hi});
    return out;
}

nlohmann::json to_json(const CouplingSummary& s) {
    auto fit = [](const ExponentFit& f) {
        return nlohmann::json{{"slope", f.slope},         {"ci_low", f.ci_low}, {"ci_high", f.ci_high},
                              {"std_error", f.std_error}, {"points", f.points}, {"zeros_dropped", f.zeros_dropped}};
    };
    return {{"runs", s.runs},
            {"checkpoints", s.checkpoints},
            {"mean_max_error", s.mean_max_error},
            {"mean_clock_drift", s.mean_clock_drift},
            {"error_fit", fit(s.error_fit)},
            {"clock_fit", fit(s.clock_fit)},
            {"max_block_mismatch", s.max_block_mismatch}};
}

void export_csv(const CouplingRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "N,S_N,W_N,E_N\n";
    char buf[128];
    for (std::size_t i = 0; i < record.checkpoints.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(record.checkpoints[i]), record.S[i], record.W[i], record.E[i]);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace asiplab::coupling
