#include "asiplab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "asiplab/blocking/approximant.hpp"
#include "asiplab/blocking/decompose.hpp"
#include "asiplab/blocking/schedule.hpp"
#include "asiplab/coupling/coupled_run.hpp"
#include "asiplab/simulate/ensemble.hpp"
#include "asiplab/simulate/systems.hpp"
#include "asiplab/stats/charfn.hpp"
#include "asiplab/stats/clt.hpp"
#include "asiplab/stats/covariance.hpp"
#include "asiplab/stats/exponent.hpp"
#include "asiplab/stats/lil.hpp"
#include "asiplab/stats/mixing_empirical.hpp"
#include "asiplab/stats/tails.hpp"
#include "asiplab/systems/interval_maps.hpp"
#include "asiplab/systems/lorentz.hpp"
#include "asiplab/transfer/coboundary.hpp"
#include "asiplab/transfer/operator.hpp"
#include "asiplab/transfer/pressure.hpp"

namespace asiplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kHorizonResolution = 2048;
constexpr double kHorizonCutoff = 30.0;

std::vector<double> split_numbers(const std::string& text, char sep, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw InputError(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw InputError(what + " is empty");
    return out;
}

void prepare_output_dir(const fs::path& dir, bool force) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw OverwriteRefused(dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir) && !force)
            throw OverwriteRefused(dir.string() + " already holds results; pass --force to overwrite");
    }
    fs::create_directories(dir);
}

void refuse_existing_file(const fs::path& file, bool force) {
    if (fs::exists(file) && !force) throw OverwriteRefused(file.string() + " exists; pass --force to overwrite");
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

bool is_markov(const SystemConfig& s) { return s.kind == "two-state" || s.kind == "full-shift" || s.kind == "markov"; }

systems::MarkovShiftModel markov_model(const SystemConfig& s) {
    if (s.kind == "two-state") return systems::MarkovShiftModel::two_state(s.flip);
    if (s.kind == "full-shift") return systems::MarkovShiftModel::full_shift(s.symbols);
    Eigen::MatrixXd p(s.matrix.size(), s.matrix.size());
    for (std::size_t i = 0; i < s.matrix.size(); ++i)
        for (std::size_t j = 0; j < s.matrix.size(); ++j) p(i, j) = s.matrix[i][j];
    return systems::MarkovShiftModel(p);
}

std::vector<double> markov_values(const ObservableConfig& o, const systems::MarkovShiftModel& model) {
    if (o.kind == "symbol") return o.values;
    std::vector<double> v(static_cast<std::size_t>(model.alphabet_size()), -1.0);
    v[0] = 1.0;
    return v;
}

transfer::CylinderFunction depth_one_function(const transfer::CylinderSpace& space, const std::vector<double>& values) {
    return transfer::centred(space, transfer::tabulate(space, 1, [&](std::span<const int> w, std::span<double> out) {
                                 out[0] = values[static_cast<std::size_t>(w[0])];
                             }));
}

systems::LorentzConfig lorentz_table(const ExperimentConfig& cfg, std::ostream& log) {
    auto table = systems::load_lorentz_config(cfg.resolve(cfg.system.table));
    if (!table.horizon_bound && !cfg.system.waive_horizon) {
        auto rep = systems::check_finite_horizon(table, kHorizonResolution, kHorizonCutoff);
        if (!rep.finite) throw HorizonViolation("horizon scan found an unbounded free flight", kHorizonCutoff);
        table.horizon_bound = rep.max_free_flight;
        log << "horizon check: finite, longest flight " << rep.max_free_flight << '\n';
    }
    return table;
}

std::vector<std::uint64_t> run_checkpoints(const RunConfig& run) {
    return run.checkpoints.empty() ? simulate::geometric_checkpoints(run.n_max) : run.checkpoints;
}

/// Calls fn(system, observable) for the configured discrete-time system.
template <class Fn>
auto with_system(const ExperimentConfig& cfg, Fn&& fn) {
    const auto& s = cfg.system;
    if (is_markov(s)) {
        auto model = markov_model(s);
        simulate::MarkovSystem sys(model, 2);
        auto obs = cfg.observable.kind == "pm1"
                       ? simulate::pm1_observable(model)
                       : simulate::symbol_observable(model, cfg.observable.values, "symbol");
        return fn(sys, obs);
    }
    if (s.kind == "doubling") {
        simulate::DoublingSystem sys;
        return fn(sys, simulate::cos2pi_observable());
    }
    if (s.kind == "lsv") {
        simulate::LsvSystem sys(systems::LsvModel(s.gamma), s.burn_in);
        return fn(sys, simulate::lsv_identity_observable(sys, cfg.observable.pilot_steps));
    }
    throw ConfigError("system.kind", "'" + s.kind + "' is not a discrete-time system");
}

simulate::EnsembleResult simulate_ensemble(const ExperimentConfig& cfg, unsigned workers, std::ostream& log) {
    const auto& run = cfg.run;
    auto checkpoints = run_checkpoints(run);
    if (cfg.system.kind == "lorentz") {
        auto table = lorentz_table(cfg, log);
        const bool waive = cfg.system.waive_horizon;
        const double t_max = static_cast<double>(run.n_max);
        return simulate::run_ensemble(
            [&](std::uint64_t seed) { return simulate::lorentz_position_series(table, t_max, checkpoints, seed, waive); },
            run.trajectories, run.master_seed, workers, "lorentz:" + cfg.system.table, "position");
    }
    return with_system(cfg, [&](const auto& sys, const auto& obs) {
        return simulate::run_ensemble(sys, obs, run.n_max, checkpoints, run.trajectories, run.master_seed, workers);
    });
}

// ---------------------------------------------------------------- analyze

struct AnalysisContext {
    const ExperimentConfig& cfg;
    const simulate::EnsembleResult& ens;
    unsigned workers;
    std::optional<fs::path> csv_stem;
    std::size_t index;
    std::ostream& log;

    fs::path csv(const std::string& test) const {
        return csv_stem->string() + "." + std::to_string(index) + "." + test + ".csv";
    }
    std::string field(const std::string& key) const { return "analysis[" + std::to_string(index) + "]." + key; }
};

template <class T>
T param(const json& p, const char* key, T fallback, const AnalysisContext& ctx) {
    if (!p.contains(key)) return fallback;
    try {
        return p.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(ctx.field(key), "has the wrong type");
    }
}

std::uint64_t pick_checkpoint(const json& p, const AnalysisContext& ctx) {
    const auto& grid = ctx.ens.checkpoints();
    std::uint64_t N = param<std::uint64_t>(p, "N", grid.back(), ctx);
    if (!std::binary_search(grid.begin(), grid.end(), N))
        throw ConfigError(ctx.field("N"), "checkpoint " + std::to_string(N) + " is not in the ensemble");
    return N;
}

Eigen::MatrixXd exact_sigma(const ExperimentConfig& cfg, const std::string& where) {
    if (is_markov(cfg.system)) {
        auto model = markov_model(cfg.system);
        auto op = transfer::TransferOperator::build(model, 1);
        return transfer::coboundary_solve(op, depth_one_function(op.space(), markov_values(cfg.observable, model))).sigma;
    }
    if (cfg.system.kind == "doubling") return Eigen::MatrixXd::Constant(1, 1, 0.5);
    throw ConfigError(where, "no exact Sigma for system " + cfg.system.kind);
}

/// Sigma named by the "sigma" parameter: "empirical" (default), "exact" or a matrix.
std::pair<Eigen::MatrixXd, bool> resolve_sigma(const json& p, std::uint64_t N, const AnalysisContext& ctx) {
    const int d = ctx.ens.dim();
    if (!p.contains("sigma") || p["sigma"] == "empirical") return {stats::empirical_sigma(ctx.ens, N).sigma_hat, true};
    if (p["sigma"] == "exact") return {exact_sigma(ctx.cfg, ctx.field("sigma")), false};
    const auto& m = p["sigma"];
    if (!m.is_array() || static_cast<int>(m.size()) != d)
        throw ConfigError(ctx.field("sigma"), "must be \"empirical\", \"exact\" or a " + std::to_string(d) + "x" +
                                                  std::to_string(d) + " matrix matching the ensemble dimension");
    Eigen::MatrixXd s(d, d);
    for (int i = 0; i < d; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != d)
            throw ConfigError(ctx.field("sigma"), "row " + std::to_string(i) + " does not match the ensemble dimension");
        for (int j = 0; j < d; ++j) s(i, j) = m[i][j].get<double>();
    }
    return {s, false};
}

stats::Verdict analyze_sigma(const json& p, const AnalysisContext& ctx) {
    auto N = pick_checkpoint(p, ctx);
    auto est = stats::empirical_sigma(ctx.ens, N);
    stats::Verdict v;
    v.test = "sigma";
    v.statistic = est.min_eigenvalue;
    v.ci_low = est.min_eigenvalue - 3.0 * est.min_eigenvalue_stderr;
    v.ci_high = est.min_eigenvalue + 3.0 * est.min_eigenvalue_stderr;
    v.threshold = 0.0;
    v.status = est.nonsingular ? stats::Status::pass : stats::Status::fail;
    auto rows = [](const Eigen::MatrixXd& m) {
        json r = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            r.push_back(row);
        }
        return r;
    };
    v.details = {{"N", N}, {"K", est.K}, {"sigma_hat", rows(est.sigma_hat)}, {"stderr", rows(est.stderr_)},
                 {"condition_number", std::isfinite(est.condition_number) ? json(est.condition_number) : json(nullptr)}};
    return v;
}

stats::Verdict analyze_clt(const json& p, const AnalysisContext& ctx) {
    auto N = pick_checkpoint(p, ctx);
    auto [sigma, estimated] = resolve_sigma(p, N, ctx);
    stats::CltOptions opt;
    opt.bootstrap = param<int>(p, "bootstrap", 199, ctx);
    opt.alpha = param<double>(p, "alpha", 0.01, ctx);
    opt.seed = param<std::uint64_t>(p, "seed", derive_seed(ctx.cfg.run.master_seed, 0xc17), ctx);
    opt.workers = ctx.workers;
    opt.sigma_estimated = estimated;
    auto res = stats::clt_test(ctx.ens.column(stats::checkpoint_index(ctx.ens, N)), ctx.ens.dim(), N, sigma, opt);
    if (ctx.csv_stem) {
        std::ofstream out(ctx.csv("clt"));
        out.precision(17);
        out << "replicate,energy\n";
        for (std::size_t b = 0; b < res.bootstrap.size(); ++b) out << b << ',' << res.bootstrap[b] << '\n';
    }
    return res.verdict;
}

stats::Verdict analyze_charfn(const json& p, const AnalysisContext& ctx) {
    const int d = ctx.ens.dim();
    std::vector<std::uint64_t> cps = param<std::vector<std::uint64_t>>(p, "checkpoints", {}, ctx);
    if (cps.empty())
        for (auto N : ctx.ens.checkpoints())
            if (N >= 16) cps.push_back(N);
    auto scalar = stats::scalar_grid(param<double>(p, "u_max", 3.0, ctx), param<int>(p, "points", 12, ctx));
    const double epsilon = param<double>(p, "epsilon", 1.0, ctx);
    double u_min = INFINITY;
    for (double u : scalar) u_min = std::min(u_min, std::abs(u));
    std::erase_if(cps, [&](std::uint64_t N) {
        if (u_min <= epsilon * std::sqrt(static_cast<double>(N))) return false;
        ctx.log << "warning: char-fn skips N = " << N << ", every grid point exceeds epsilon sqrt(N)\n";
        return true;
    });
    if (cps.empty()) throw ConfigError(ctx.field("epsilon"), "trims the grid away at every checkpoint");
    auto [sigma, estimated] = resolve_sigma(p, cps.back(), ctx);
    std::vector<double> grid;
    for (int c = 0; c < d; ++c)
        for (double u : scalar)
            for (int k = 0; k < d; ++k) grid.push_back(k == c ? u : 0.0);

    stats::ExactCharFn exact;
    std::optional<transfer::TransferOperator> op;
    std::optional<transfer::CylinderFunction> phi;
    if (is_markov(ctx.cfg.system) && !estimated) {
        auto model = markov_model(ctx.cfg.system);
        op.emplace(transfer::TransferOperator::build(model, 1));
        phi.emplace(depth_one_function(op->space(), markov_values(ctx.cfg.observable, model)));
        exact = [&](std::span<const double> u, std::uint64_t N) { return transfer::char_fn_exact(*op, *phi, u, N); };
    }
    auto res = stats::char_fn_test(ctx.ens, sigma, grid, cps, epsilon, exact,
                                   param<double>(p, "slack", 0.05, ctx));
    for (const auto& w : res.warnings) ctx.log << "warning: " << w << '\n';
    if (ctx.csv_stem) stats::export_csv(res, ctx.csv("char-fn"));
    return res.verdict;
}

stats::Verdict analyze_blocking(const json& p, const AnalysisContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (ctx.ens.dim() != 1) throw ConfigError(ctx.field("test"), "blocking diagnostics need a scalar ensemble");
    const double Q = param<double>(p, "Q", 2.0, ctx), alpha = param<double>(p, "alpha", 0.5, ctx);
    auto schedule = blocking::BlockSchedule::build(Q, alpha, cfg.run.n_max);
    const auto count = param<std::uint64_t>(p, "trajectories", cfg.run.trajectories, ctx);
    const auto& cps = ctx.ens.checkpoints();
    const std::uint64_t length = schedule.boundary(schedule.block_of(cps.back()));
    blocking::ApproximantGenerator gen;
    std::optional<transfer::CylinderSpace> space;
    std::optional<transfer::CylinderFunction> f;
    if (is_markov(cfg.system)) {
        auto model = markov_model(cfg.system);
        space.emplace(model, 1);
        f.emplace(depth_one_function(*space, markov_values(cfg.observable, model)));
        gen = [&](std::uint64_t seed) {
            return blocking::markov_approximant_series(*space, *f, schedule, length, seed);
        };
    } else if (cfg.system.kind == "doubling") {
        gen = [&](std::uint64_t seed) { return blocking::doubling_approximant_series(schedule, length, seed); };
    } else {
        throw ConfigError(ctx.field("test"), "blocking diagnostics need a Markov or doubling system");
    }
    auto samples = blocking::remainder_ensemble(gen, schedule, cps, count, cfg.run.master_seed, ctx.workers);
    auto diag = blocking::remainder_diagnostics(samples, cps, schedule, param<double>(p, "slack", 0.1, ctx));
    if (ctx.csv_stem) {
        std::ofstream out(ctx.csv("blocking"));
        out.precision(17);
        out << "N,z_rms,tail_rms,residual_rms\n";
        for (std::size_t i = 0; i < diag.checkpoints.size(); ++i)
            out << diag.checkpoints[i] << ',' << diag.z_rms[i] << ',' << diag.tail_rms[i] << ',' << diag.residual_rms[i]
                << '\n';
    }
    stats::Verdict v;
    v.test = "blocking";
    v.statistic = diag.z_fit.slope;
    v.ci_low = diag.z_fit.ci_low;
    v.ci_high = diag.z_fit.ci_high;
    v.threshold = diag.z_bound;
    v.status = (diag.z_ok && diag.tail_ok) ? stats::Status::pass : stats::Status::fail;
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    v.details = {{"Q", Q},
                 {"alpha", alpha},
                 {"z_slope", num(diag.z_fit.slope)},
                 {"z_bound", diag.z_bound},
                 {"tail_slope", num(diag.tail_fit.slope)},
                 {"tail_bound", diag.tail_bound},
                 {"residual_settled", diag.residual_settled},
                 {"trajectories", count}};
    return v;
}

stats::Verdict analyze_lil(const json& p, const AnalysisContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.run.n_max < 10'000) throw ConfigError("run.n_max", "the LIL statistic needs n_max >= 10^4");
    auto [sigma, estimated] = resolve_sigma(p, ctx.ens.checkpoints().back(), ctx);
    const auto n = cfg.run.n_max;
    const auto start = std::max<std::uint64_t>(16, static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))));
    stats::LilTracker tracker(sigma, start);
    with_system(cfg, [&](const auto& sys, const auto& obs) {
        Rng rng(derive_seed(cfg.run.master_seed, 0));
        auto state = sys.initial(rng);
        std::vector<double> x(static_cast<std::size_t>(obs.dimension));
        for (std::uint64_t k = 0; k < n; ++k) {
            obs.evaluate_centered(state, x);
            tracker.push(x);
            sys.advance(state, rng);
        }
        return 0;
    });
    auto res = stats::lil_result(tracker, param<double>(p, "lo", 0.8, ctx), param<double>(p, "hi", 1.2, ctx));
    res.verdict.details["sigma_estimated"] = estimated;
    return res.verdict;
}

stats::Verdict analyze_tails(const json& p, const AnalysisContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.system.kind != "lsv") throw ConfigError(ctx.field("test"), "return-time tails need the lsv system");
    systems::LsvModel model(cfg.system.gamma);
    Rng rng(param<std::uint64_t>(p, "seed", derive_seed(cfg.run.master_seed, 0x7a11), ctx));
    stats::ReturnTimeSample sample{
        systems::sample_return_times(model, param<std::uint64_t>(p, "samples", 1'000'000, ctx), rng), "lsv"};
    stats::TailFitOptions opt;
    opt.declared_p = param<double>(p, "p", 3.0, ctx);
    auto fit = stats::return_tail_fit(sample, opt);
    if (ctx.csv_stem) stats::export_csv(fit, ctx.csv("tails"));
    return stats::lp_verdict(fit, opt.declared_p);
}

stats::Verdict analyze_mixing(const json& p, const AnalysisContext& ctx) {
    const auto& cfg = ctx.cfg;
    if (!is_markov(cfg.system)) throw ConfigError(ctx.field("test"), "cylinder mixing needs a Markov system");
    auto model = markov_model(cfg.system);
    auto a = param<std::vector<int>>(p, "a", {0}, ctx), b = param<std::vector<int>>(p, "b", {0}, ctx);
    auto lags = param<std::vector<std::uint64_t>>(p, "lags", {0, 1, 2, 3, 4, 5, 6}, ctx);
    stats::MixingSampling s;
    s.trajectories = param<std::size_t>(p, "trajectories", 10, ctx);
    s.length = param<std::uint64_t>(p, "length", 100'000, ctx);
    s.master_seed = cfg.run.master_seed;
    s.workers = ctx.workers;
    auto res = stats::mixing_decay_empirical(model, a, b, lags, s);
    if (ctx.csv_stem) {
        std::ofstream out(ctx.csv("mixing"));
        out.precision(17);
        out << "lag,difference,stderr,exact\n";
        for (const auto& m : res.lags) out << m.lag << ',' << m.difference << ',' << m.stderr_ << ',' << m.exact << '\n';
    }
    return res.verdict;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const OverwriteRefused*>(&e)) return kOverwrite;
    if (dynamic_cast<const InputError*>(&e)) return kUsage;
    return kRuntime;
}

systems::MarkovShiftModel parse_model(const std::string& spec) {
    auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "two-state") return systems::MarkovShiftModel::two_state(arg.empty() ? 0.3 : split_numbers(arg, ',', "flip")[0]);
    if (kind == "full-shift") {
        double n = arg.empty() ? 2.0 : split_numbers(arg, ',', "symbols")[0];
        if (n < 2 || n != std::floor(n) || n > 64) throw InputError("full-shift needs an integer symbol count in [2, 64]");
        return systems::MarkovShiftModel::full_shift(static_cast<int>(n));
    }
    if (kind == "matrix") {
        std::vector<std::vector<double>> rows;
        std::stringstream ss(arg);
        std::string row;
        while (std::getline(ss, row, ';')) rows.push_back(split_numbers(row, ',', "matrix row"));
        Eigen::MatrixXd p(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw InputError("matrix model must be square");
            for (std::size_t j = 0; j < rows.size(); ++j) p(i, j) = rows[i][j];
        }
        return systems::MarkovShiftModel(p);
    }
    throw InputError("unknown model '" + spec + "' (two-state:<flip>, full-shift:<n>, matrix:<rows>)");
}

std::vector<double> parse_symbol_values(const std::string& spec, const systems::MarkovShiftModel& model) {
    if (spec == "pm1") {
        std::vector<double> v(static_cast<std::size_t>(model.alphabet_size()), -1.0);
        v[0] = 1.0;
        return v;
    }
    if (spec.rfind("symbol:", 0) == 0) {
        auto v = split_numbers(spec.substr(7), ',', "symbol values");
        if (static_cast<int>(v.size()) != model.alphabet_size()) throw InputError("symbol observable needs one value per symbol");
        return v;
    }
    throw InputError("unknown observable '" + spec + "' (pm1, symbol:<v0>,<v1>,...)");
}

int cmd_simulate(const SimulateArgs& args, std::ostream& log) {
    auto cfg = load_config(args.config);
    fs::path dir = args.out ? *args.out : fs::path(cfg.output_dir);
    if (dir.empty()) throw ConfigError("output.dir", "required for simulate (or pass --out)");
    if (!args.out) dir = cfg.resolve(cfg.output_dir).lexically_normal();
    prepare_output_dir(dir, args.force);
    const unsigned workers = args.workers.value_or(cfg.run.workers);

    auto ens = simulate_ensemble(cfg, workers, log);
    simulate::save_ensemble(ens, dir / "ensemble.bin");
    simulate::export_csv(ens, dir / "ensemble.csv");
    json summary = simulate::ensemble_summary(ens);
    summary["command"] = "simulate";
    summary["config"] = cfg.raw;
    summary["config_hash"] = cfg.hash_hex();
    summary["base_dir"] = fs::absolute(cfg.base_dir).lexically_normal().string();
    summary["workers"] = workers;
    write_json(dir / "summary.json", summary);
    log << "wrote " << ens.size() << " trajectories to " << dir.string() << '\n';
    return ens.ok() ? kPass : kRuntime;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& log) {
    auto cfg = load_config(args.config);
    if (cfg.analyses.empty()) throw ConfigError("analysis", "no analyses requested");
    if (args.out) refuse_existing_file(*args.out, args.force);
    auto ens = simulate::load_ensemble(args.ensemble);
    if (!ens.ok() || ens.size() == 0) throw Error("ensemble has failed or missing trajectories");
    const unsigned workers = args.workers.value_or(cfg.run.workers);
    std::optional<fs::path> stem;
    if (args.out) stem = args.out->parent_path() / args.out->stem();

    json verdicts = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < cfg.analyses.size(); ++i) {
        const auto& a = cfg.analyses[i];
        AnalysisContext ctx{cfg, ens, workers, stem, i, log};
        stats::Verdict v;
        if (a.test == "sigma") v = analyze_sigma(a.params, ctx);
        else if (a.test == "clt") v = analyze_clt(a.params, ctx);
        else if (a.test == "char-fn") v = analyze_charfn(a.params, ctx);
        else if (a.test == "blocking") v = analyze_blocking(a.params, ctx);
        else if (a.test == "lil") v = analyze_lil(a.params, ctx);
        else if (a.test == "tails") v = analyze_tails(a.params, ctx);
        else if (a.test == "mixing") v = analyze_mixing(a.params, ctx);
        all_pass = all_pass && v.passed();
        verdicts.push_back(stats::to_json(v));
        log << a.test << ": " << stats::status_name(v.status) << '\n';
    }
    json doc = {{"config_hash", cfg.hash_hex()}, {"ensemble", args.ensemble.string()}, {"verdicts", verdicts}};
    if (args.out)
        write_json(*args.out, doc);
    else
        out << doc.dump(2) << '\n';
    return all_pass ? kPass : kSoftFail;
}

int cmd_couple(const CoupleArgs& args, std::ostream& out, std::ostream& log) {
    auto model = parse_model(args.model);
    auto values = parse_symbol_values(args.observable, model);
    if (args.runs == 0) throw InputError("--runs must be positive");
    if (args.out) prepare_output_dir(*args.out, args.force);
    auto schedule = blocking::BlockSchedule::build(args.Q, args.alpha, args.n_max);
    auto checkpoints = simulate::geometric_checkpoints(args.n_max, std::min<std::uint64_t>(100, args.n_max));
    coupling::CouplingOptions opt;
    opt.K = args.K;
    auto records = coupling::coupled_ensemble(model, values, schedule, args.n_max, checkpoints, args.runs, args.seed,
                                              args.workers, opt);
    json doc = {{"model", args.model},          {"observable", args.observable}, {"Q", args.Q},
                {"alpha", args.alpha},          {"n_max", args.n_max},           {"seed", args.seed},
                {"K", records.front().K},       {"sigma", records.front().sigma}};
    try {
        doc["summary"] = coupling::to_json(
            coupling::summarise(records, std::min(args.fit_lo, static_cast<double>(args.n_max)), INFINITY));
    } catch (const FitError& e) {
        log << "warning: " << e.what() << '\n';
        doc["summary"] = nullptr;
    }
    if (args.out) {
        write_json(*args.out / "summary.json", doc);
        coupling::export_csv(records.front(), *args.out / "run_0.csv");
    }
    out << doc.dump(2) << '\n';
    return kPass;
}

int cmd_spectra(const SpectraArgs& args, std::ostream& out) {
    auto model = parse_model(args.model);
    auto values = parse_symbol_values(args.observable, model);
    auto op = transfer::TransferOperator::build(model, 1);
    auto phi = depth_one_function(op.space(), values);
    auto pressure = transfer::sigma_from_pressure(op, phi);
    auto cob = transfer::coboundary_solve(op, phi);
    json doc = {{"model", args.model},
                {"observable", args.observable},
                {"sigma2_pressure", pressure.sigma(0, 0)},
                {"sigma2_coboundary", cob.sigma(0, 0)},
                {"eigen_gap", transfer::eigen_gap(op)},
                {"coboundary_terms", cob.terms},
                {"l_psi_norm", cob.l_psi_norm}};
    out << doc.dump(2) << '\n';
    return kPass;
}

int cmd_exponent(const ExponentArgs& args, std::ostream& out) {
    auto t = stats::asip_exponent(args.d, stats::MomentOrder::parse(args.p), stats::parse_regime(args.regime));
    if (args.json)
        out << json{{"d", t.d}, {"p", t.p.str()}, {"regime", stats::regime_name(t.regime)},
                    {"beta", stats::to_string(t.beta)},
                    {"beta_decimal", boost::rational_cast<double>(t.beta)}}.dump(2)
            << '\n';
    else
        out << stats::to_string(t.beta) << '\n';
    return kPass;
}

int cmd_horizon_check(const HorizonArgs& args, std::ostream& out) {
    auto table = systems::load_lorentz_config(args.table);
    auto rep = systems::check_finite_horizon(table, args.resolution, args.cutoff);
    json doc = {{"table", args.table.string()},
                {"finite", rep.finite},
                {"max_free_flight", rep.max_free_flight},
                {"launch_point", {rep.launch_point.x, rep.launch_point.y}},
                {"launch_direction", {rep.launch_direction.x, rep.launch_direction.y}},
                {"rays", rep.rays},
                {"resolution", args.resolution},
                {"cutoff", args.cutoff}};
    out << doc.dump(2) << '\n';
    return rep.finite ? kPass : kSoftFail;
}

}  // namespace asiplab::cli
