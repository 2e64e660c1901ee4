#include "asiplab/simulate/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

namespace asiplab::simulate {

const std::vector<std::uint64_t>& EnsembleResult::checkpoints() const {
    for (const auto& t : trajectories)
        if (!t.checkpoints.empty()) return t.checkpoints;
    throw InputError("ensemble has no successful trajectory");
}

int EnsembleResult::dim() const {
    for (const auto& t : trajectories)
        if (!t.checkpoints.empty()) return t.dim;
    throw InputError("ensemble has no successful trajectory");
}

std::vector<double> EnsembleResult::column(std::size_t i) const {
    std::vector<double> out;
    const int d = dim();
    out.reserve(trajectories.size() * static_cast<std::size_t>(d));
    for (const auto& t : trajectories) {
        if (t.checkpoints.empty()) continue;
        const auto row = t.at(i);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

EnsembleResult run_ensemble(const SeriesGenerator& generate, std::uint64_t k, std::uint64_t master_seed,
                            unsigned workers, std::string system, std::string observable) {
    if (k < 1) throw InputError("ensemble needs at least one trajectory");
    if (workers < 1) workers = 1;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, k));

    EnsembleResult result;
    result.master_seed = master_seed;
    result.system = std::move(system);
    result.observable = std::move(observable);
    result.trajectories.resize(k);
    std::vector<std::string> errors(k);

    const auto start = std::chrono::steady_clock::now();
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t i = next++; i < k; i = next++) {
            const std::uint64_t seed = derive_seed(master_seed, i);
            try {
                result.trajectories[i] = generate(seed);
                result.trajectories[i].seed = seed;
            } catch (const std::exception& e) {
                result.trajectories[i] = PartialSumSeries{};
                result.trajectories[i].seed = seed;
                errors[i] = e.what();
                if (errors[i].empty()) errors[i] = "unknown failure";
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (std::uint64_t i = 0; i < k; ++i)
        if (!errors[i].empty()) result.failures.push_back({i, errors[i]});
    return result;
}

}  // namespace asiplab::simulate
