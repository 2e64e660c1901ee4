#include "asiplab/blocking/decompose.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "asiplab/common/error.hpp"
#include "asiplab/common/random.hpp"

namespace asiplab::blocking {

namespace {

void check_series(const ApproximantSeries& s) {
    if (s.dim < 1) throw InputError("series dimension must be positive");
    if (s.eta.size() != s.eta_l.size()) throw InputError("eta and eta_l differ in length");
    if (s.eta.size() % static_cast<std::size_t>(s.dim) != 0) throw InputError("series length not a multiple of dim");
}

template <class T>
double norm(std::span<const T> v) {
    long double acc = 0.0L;
    for (const auto x : v) acc += static_cast<long double>(x) * x;
    return static_cast<double>(std::sqrt(acc));
}

}  // namespace

BlockDecomposition decompose(const ApproximantSeries& series, const BlockSchedule& schedule) {
    check_series(series);
    const auto d = static_cast<std::size_t>(series.dim);
    const std::uint64_t n = series.size();
    if (n == 0) throw InputError("empty series");
    BlockDecomposition out;
    out.dim = series.dim;
    out.length = n;
    out.blocks = schedule.block_of(n);
    out.last_partial = schedule.boundary(out.blocks) != n;
    std::vector<long double> y(out.blocks * d, 0.0L), z(y.size(), 0.0L), r(y.size(), 0.0L), total(d, 0.0L);
    for (std::size_t j = 1; j <= out.blocks; ++j) {
        const std::uint64_t lo = schedule.boundary(j - 1), mid = schedule.long_end(j);
        const std::uint64_t hi = std::min<std::uint64_t>(schedule.boundary(j), n);
        for (std::uint64_t i = lo; i < hi; ++i) {
            auto& part = i < mid ? y : z;
            for (std::size_t c = 0; c < d; ++c) {
                const long double e = series.eta[i * d + c], el = series.eta_l[i * d + c];
                part[(j - 1) * d + c] += el;
                r[(j - 1) * d + c] += e - el;
                total[c] += e;
            }
        }
    }
    std::vector<long double> rebuilt(d, 0.0L);
    for (std::size_t k = 0; k < y.size(); ++k) rebuilt[k % d] += y[k] + z[k] + r[k];
    for (std::size_t c = 0; c < d; ++c)
        out.telescoping_error = std::max(out.telescoping_error, static_cast<double>(std::abs(rebuilt[c] - total[c])));
    auto narrow = [](const std::vector<long double>& v) { return std::vector<double>(v.begin(), v.end()); };
    out.y = narrow(y);
    out.z = narrow(z);
    out.residuals = narrow(r);
    return out;
}

std::vector<double> long_block_rms(std::span<const BlockDecomposition> decompositions) {
    if (decompositions.empty()) return {};
    std::size_t complete = SIZE_MAX;
    for (const auto& dc : decompositions)
        complete = std::min(complete, dc.last_partial ? dc.blocks - 1 : dc.blocks);
    std::vector<double> out(complete);
    for (std::size_t j = 1; j <= complete; ++j) {
        long double acc = 0.0L;
        for (const auto& dc : decompositions)
            for (int c = 0; c < dc.dim; ++c) acc += static_cast<long double>(dc.y_at(j, c)) * dc.y_at(j, c);
        out[j - 1] = static_cast<double>(std::sqrt(acc / static_cast<long double>(decompositions.size())));
    }
    return out;
}

RemainderSample remainder_sample(const ApproximantSeries& series, const BlockSchedule& schedule,
                                 std::span<const std::uint64_t> checkpoints) {
    check_series(series);
    if (checkpoints.empty()) throw InputError("no checkpoints");
    for (std::size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] <= checkpoints[i - 1]) throw InputError("checkpoints must increase");
    const auto d = static_cast<std::size_t>(series.dim);
    const std::size_t top = schedule.block_of(checkpoints.back());
    if (series.size() < schedule.boundary(top))
        throw InputError("series must reach P_M for the last checkpoint");
    const auto span_of = [d](const std::vector<long double>& v) { return std::span<const long double>(v.data(), d); };

    // Per block: cumulative z, cumulative eta - eta_l, and A_j.
    std::vector<double> zcum(top + 1, 0.0), rcum(top + 1, 0.0), tail(top + 1, 0.0);
    std::vector<long double> zacc(d, 0.0L), racc(d, 0.0L), acc(d, 0.0L);
    for (std::size_t j = 1; j <= top; ++j) {
        const std::uint64_t lo = schedule.boundary(j - 1), mid = schedule.long_end(j), hi = schedule.boundary(j);
        for (std::uint64_t i = lo; i < hi; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                if (i >= mid) zacc[c] += series.eta_l[i * d + c];
                racc[c] += static_cast<long double>(series.eta[i * d + c]) - series.eta_l[i * d + c];
            }
        // Tail sums from the block end backwards; N' = hi gives the empty tail.
        std::fill(acc.begin(), acc.end(), 0.0L);
        double best = 0.0;
        for (std::uint64_t i = hi; i > lo + 1; --i) {
            for (std::size_t c = 0; c < d; ++c) acc[c] += series.eta[(i - 1) * d + c];
            best = std::max(best, norm(span_of(acc)));
        }
        zcum[j] = norm(span_of(zacc));
        rcum[j] = norm(span_of(racc));
        tail[j] = best;
    }

    RemainderSample out;
    out.z_sum.reserve(checkpoints.size());
    long double running = 0.0L;
    std::uint64_t pos = 0;
    for (const auto N : checkpoints) {
        const std::size_t M = schedule.block_of(N);
        out.z_sum.push_back(zcum[M]);
        out.max_tail.push_back(tail[M]);
        out.residual.push_back(rcum[M]);
        for (; pos < N; ++pos) {
            long double s = 0.0L;
            for (std::size_t c = 0; c < d; ++c) {
                const long double diff = static_cast<long double>(series.eta[pos * d + c]) - series.eta_l[pos * d + c];
                s += diff * diff;
            }
            running += std::sqrt(s);
        }
        out.residual_abs.push_back(static_cast<double>(running));
    }
    return out;
}

RemainderDiagnostics remainder_diagnostics(std::span<const RemainderSample> samples,
                                           std::span<const std::uint64_t> checkpoints, const BlockSchedule& schedule,
                                           double slack, double residual_tolerance) {
    if (samples.empty()) throw InputError("no remainder samples");
    const std::size_t m = checkpoints.size();
    for (const auto& s : samples)
        if (s.z_sum.size() != m || s.max_tail.size() != m || s.residual.size() != m || s.residual_abs.size() != m)
            throw InputError("remainder sample does not match the checkpoints");
    RemainderDiagnostics out;
    out.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    const auto k = static_cast<long double>(samples.size());
    auto rms = [&](auto member) {
        std::vector<double> v(m);
        for (std::size_t i = 0; i < m; ++i) {
            long double acc = 0.0L;
            for (const auto& s : samples) acc += static_cast<long double>((s.*member)[i]) * (s.*member)[i];
            v[i] = static_cast<double>(std::sqrt(acc / k));
        }
        return v;
    };
    out.z_rms = rms(&RemainderSample::z_sum);
    out.tail_rms = rms(&RemainderSample::max_tail);
    out.residual_rms = rms(&RemainderSample::residual);

    const std::vector<double> n(checkpoints.begin(), checkpoints.end());
    out.z_fit = coupling::exponent_fit(n, out.z_rms);
    out.tail_fit = coupling::exponent_fit(n, out.tail_rms);
    try {
        out.residual_fit = coupling::exponent_fit(n, out.residual_rms);
    } catch (const FitError&) {
        // only a couple of non-zero residuals: nothing to fit, reported as NaN
        out.residual_fit.slope = out.residual_fit.ci_low = out.residual_fit.ci_high = std::nan("");
    }

    const double Q = schedule.Q(), a = schedule.alpha();
    out.z_bound = (0.5 + 0.5 * a) / (1.0 + Q) + slack;
    out.tail_bound = 0.5 * Q / (1.0 + Q) + slack;
    out.z_ok = out.z_fit.slope <= out.z_bound;
    out.tail_ok = out.tail_fit.slope <= out.tail_bound;

    std::vector<double> mean_abs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        long double acc = 0.0L;
        for (const auto& s : samples) acc += s.residual_abs[i];
        mean_abs[i] = static_cast<double>(acc / k);
    }
    for (std::size_t i = m; i-- > 0;) {
        if (i + 1 < m && mean_abs[i + 1] - mean_abs[i] > residual_tolerance) break;
        out.residual_settled = static_cast<std::int64_t>(i);
    }
    if (out.residual_settled == static_cast<std::int64_t>(m) - 1 && m > 1) {
        // Settled only at the last point means no evidence of convergence.
        out.residual_settled = -1;
    }
    return out;
}

std::vector<RemainderSample> remainder_ensemble(const ApproximantGenerator& generate, const BlockSchedule& schedule,
                                                std::span<const std::uint64_t> checkpoints, std::size_t count,
                                                std::uint64_t master_seed, unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::vector<RemainderSample> out(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                    try {
                        out[i] = remainder_sample(generate(derive_seed(master_seed, i)), schedule, checkpoints);
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

}  // namespace asiplab::blocking
