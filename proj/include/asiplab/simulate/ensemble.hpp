#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "asiplab/simulate/series.hpp"

namespace asiplab::simulate {

struct TrajectoryFailure {
    std::uint64_t index = 0;
    std::string message;
    bool operator==(const TrajectoryFailure&) const = default;
};

/// Trajectory i is generated from derive_seed(master_seed, i).  Failed
/// trajectories keep an empty series and are listed in `failures`.
struct EnsembleResult {
    std::vector<PartialSumSeries> trajectories;
    std::uint64_t master_seed = 0;
    std::string system;
    std::string observable;
    std::vector<TrajectoryFailure> failures;
    double wall_seconds = 0.0;  // not part of equality

    std::size_t size() const noexcept { return trajectories.size(); }
    bool ok() const noexcept { return failures.empty(); }
    const std::vector<std::uint64_t>& checkpoints() const;
    int dim() const;
    /// Matrix of S_N at checkpoint `i` over successful trajectories, K x d.
    std::vector<double> column(std::size_t checkpoint_index) const;
    bool operator==(const EnsembleResult& o) const {
        return trajectories == o.trajectories && master_seed == o.master_seed && system == o.system &&
               observable == o.observable && failures == o.failures;
    }
};

using SeriesGenerator = std::function<PartialSumSeries(std::uint64_t seed)>;

/// Runs `k` trajectories on `workers` threads.  Results are stored by index,
/// so the outcome does not depend on the worker count.
EnsembleResult run_ensemble(const SeriesGenerator& generate, std::uint64_t k, std::uint64_t master_seed,
                            unsigned workers, std::string system, std::string observable);

template <SystemModel System>
EnsembleResult run_ensemble(const System& system, const ObservableSpec<typename System::State>& obs,
                            std::uint64_t n_max, std::span<const std::uint64_t> checkpoints, std::uint64_t k,
                            std::uint64_t master_seed, unsigned workers) {
    check_checkpoints(checkpoints, n_max);
    std::vector<std::uint64_t> grid(checkpoints.begin(), checkpoints.end());
    return run_ensemble(
        [&system, &obs, n_max, grid](std::uint64_t seed) { return birkhoff_series(system, obs, n_max, grid, seed); },
        k, master_seed, workers, system.descriptor(), obs.name);
}

/// Binary format: magic "ASIPENS1", u32 version, then little-endian fields.
/// Wall time is not stored, so reruns produce identical files.
void save_ensemble(const EnsembleResult& result, const std::filesystem::path& path);
EnsembleResult load_ensemble(const std::filesystem::path& path);

/// CSV with header N,S_1,...,S_d,seed; one row per trajectory and
/// checkpoint, values printed with 17 significant digits.
void export_csv(const EnsembleResult& result, const std::filesystem::path& path);
EnsembleResult import_csv(const std::filesystem::path& path);

/// Run summary: descriptors, seeds, checkpoint grid, failures and timing.
nlohmann::json ensemble_summary(const EnsembleResult& result);

}  // namespace asiplab::simulate
