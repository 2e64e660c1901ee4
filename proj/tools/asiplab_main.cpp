#include <iostream>

#include "CLI11.hpp"

#include "asiplab/cli/commands.hpp"

using namespace asiplab::cli;

int main(int argc, char** argv) {
    CLI::App app{"asiplab: almost sure invariance principle experiments"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run an ensemble from an experiment config");
    simulate->add_option("--config", sim.config, "Experiment config JSON (or a previous summary.json)")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--out", sim.out, "Output directory (overrides output.dir)");
    simulate->add_option("--workers", sim.workers, "Worker threads (overrides run.workers)");
    simulate->add_flag("--force", sim.force, "Overwrite a non-empty output directory");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Run the configured statistical tests on an ensemble");
    analyze->add_option("--config", an.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    analyze->add_option("--ensemble", an.ensemble, "ensemble.bin written by simulate")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--out", an.out, "Verdict JSON path; curves are written beside it");
    analyze->add_option("--workers", an.workers, "Worker threads");
    analyze->add_flag("--force", an.force, "Overwrite an existing verdict file");

    CoupleArgs cp;
    auto* couple = app.add_subcommand("couple", "Couple Markov partial sums with a Brownian motion");
    couple->add_option("--model", cp.model, "two-state:<flip> | full-shift:<n> | matrix:<r0>;<r1>;...")
        ->capture_default_str();
    couple->add_option("--observable", cp.observable, "pm1 | symbol:<v0>,<v1>,...")->capture_default_str();
    couple->add_option("--n-max", cp.n_max, "Steps per run")->capture_default_str()->check(CLI::PositiveNumber);
    couple->add_option("--runs", cp.runs, "Independent runs")->capture_default_str();
    couple->add_option("--seed", cp.seed, "Master seed")->capture_default_str();
    couple->add_option("--Q", cp.Q, "Short-block exponent Q")->capture_default_str();
    couple->add_option("--alpha", cp.alpha, "Long-block exponent alpha")->capture_default_str();
    couple->add_option("--K", cp.K, "Lookahead blocks (0 picks the smallest adequate K)")->capture_default_str();
    couple->add_option("--fit-lo", cp.fit_lo, "Smallest N used in the exponent fits")->capture_default_str();
    couple->add_option("--workers", cp.workers, "Worker threads")->capture_default_str();
    couple->add_option("--out", cp.out, "Directory for summary.json and run_0.csv");
    couple->add_flag("--force", cp.force, "Overwrite a non-empty output directory");

    SpectraArgs sp;
    auto* spectra = app.add_subcommand("spectra", "Asymptotic variance and spectral gap of a Markov observable");
    spectra->add_option("--model", sp.model, "two-state:<flip> | full-shift:<n> | matrix:<r0>;<r1>;...")
        ->capture_default_str();
    spectra->add_option("--observable", sp.observable, "pm1 | symbol:<v0>,<v1>,...")->capture_default_str();

    ExponentArgs ex;
    auto* exponent = app.add_subcommand("exponent", "Error exponent for dimension d and moment order p");
    exponent->add_option("--d", ex.d, "Dimension")->capture_default_str();
    exponent->add_option("--p", ex.p, "Moment order: inf, an integer or a fraction a/b")->capture_default_str();
    exponent->add_option("--regime", ex.regime, "axiom-A | nonuniform | scalar-improved")->capture_default_str();
    exponent->add_flag("--json", ex.json, "Print JSON instead of the bare fraction");

    HorizonArgs hz;
    auto* horizon = app.add_subcommand("horizon-check", "Scan a Lorentz table for an infinite horizon");
    horizon->add_option("--table", hz.table, "Lorentz table file")->required()->check(CLI::ExistingFile);
    horizon->add_option("--resolution", hz.resolution, "Launch directions per scatterer")->capture_default_str();
    horizon->add_option("--cutoff", hz.cutoff, "Free-flight length treated as unbounded")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim, std::cerr);
        if (*analyze) return cmd_analyze(an, std::cout, std::cerr);
        if (*couple) return cmd_couple(cp, std::cout, std::cerr);
        if (*spectra) return cmd_spectra(sp, std::cout);
        if (*exponent) return cmd_exponent(ex, std::cout);
        if (*horizon) return cmd_horizon_check(hz, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kUsage;
}
