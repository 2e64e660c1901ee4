#include <filesystem>
#include <fstream>
#include <sstream>

#include "asiplab/cli/commands.hpp"
#include "asiplab/simulate/ensemble.hpp"
#include "doctest.h"

using namespace asiplab;
using namespace asiplab::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Fresh scratch directory per test case.
struct Scratch {
    fs::path dir;
    explicit Scratch(const char* name) : dir(fs::temp_directory_path() / (std::string("asiplab_cli_") + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path write(const std::string& name, const json& j) const {
        std::ofstream(dir / name) << j.dump(2);
        return dir / name;
    }
};

json minimal_doubling() {
    return {{"system", {{"kind", "doubling"}}},
            {"observable", {{"kind", "cos2pi"}}},
            {"run", {{"n_max", 1000}, {"trajectories", 1}, {"master_seed", 5}}},
            {"output", {{"dir", "run"}}}};
}

json two_state(std::uint64_t K, std::uint64_t N) {
    return {{"system", {{"kind", "two-state"}, {"flip", 0.3}}},
            {"observable", {{"kind", "pm1"}}},
            {"run", {{"n_max", N}, {"trajectories", K}, {"master_seed", 42}}},
            {"output", {{"dir", "run"}}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int exit_of(auto&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return exit_code_for(e);
    }
}

}  // namespace

TEST_CASE("exponent subcommand") {
    std::ostringstream out;
    CHECK(cmd_exponent({2, "inf", "nonuniform", false}, out) == kPass);
    CHECK(out.str() == "7/15\n");

    out.str("");
    cmd_exponent({1, "inf", "axiom-A", true}, out);
    auto j = json::parse(out.str());
    CHECK(j["beta"] == "5/11");

    CHECK(exit_of([] {
              std::ostringstream o;
              return cmd_exponent({1, "2", "nonuniform", false}, o);
          }) == kUsage);
    CHECK(exit_of([] {
              std::ostringstream o;
              return cmd_exponent({1, "4", "sideways", false}, o);
          }) == kUsage);
}

TEST_CASE("spectra subcommand: two-state chain") {
    std::ostringstream out;
    CHECK(cmd_spectra({"two-state:0.3", "pm1"}, out) == kPass);
    auto j = json::parse(out.str());
    // sum over lags of 0.4^|k|
    const double lambda = 1.0 - 2.0 * 0.3;
    double oracle = 1.0;
    for (int k = 1; k < 200; ++k) oracle += 2.0 * std::pow(lambda, k);
    CHECK(j["sigma2_pressure"].get<double>() == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(j["sigma2_coboundary"].get<double>() == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(j["eigen_gap"].get<double>() == doctest::Approx(1.0 - lambda).epsilon(1e-9));
}

TEST_CASE("model and observable parsing") {
    CHECK(parse_model("two-state:0.25").alphabet_size() == 2);
    CHECK(parse_model("full-shift:3").alphabet_size() == 3);
    CHECK(parse_model("matrix:0.5,0.5;0.2,0.8").alphabet_size() == 2);
    CHECK_THROWS_AS(parse_model("matrix:0.5,0.5;0.2"), InputError);
    CHECK_THROWS_AS(parse_model("bogus:1"), InputError);
    CHECK_THROWS_AS(parse_model("two-state:x"), InputError);
    auto m = parse_model("full-shift:3");
    CHECK(parse_symbol_values("pm1", m) == std::vector<double>{1.0, -1.0, -1.0});
    CHECK(parse_symbol_values("symbol:1,2,3", m) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THROWS_AS(parse_symbol_values("symbol:1,2", m), InputError);
}

TEST_CASE("config validation names the field") {
    auto field_of = [](const json& j) -> std::string {
        try {
            parse_config(j);
        } catch (const ConfigError& e) {
            CHECK(exit_code_for(e) == kUsage);
            return e.field();
        }
        return "";
    };
    auto j = minimal_doubling();
    j["run"].erase("master_seed");
    CHECK(field_of(j) == "run.master_seed");

    j = minimal_doubling();
    j["run"]["masterseed"] = 1;
    CHECK(field_of(j) == "run.masterseed");

    j = minimal_doubling();
    j["observable"]["kind"] = "pm1";
    CHECK(field_of(j) == "observable.kind");

    j = two_state(10, 100);
    j["system"]["flip"] = 1.5;
    CHECK(field_of(j) == "system.flip");

    j = two_state(10, 100);
    j["run"]["checkpoints"] = {10, 5};
    CHECK(field_of(j) == "run.checkpoints[1]");

    j = two_state(10, 100);
    j["analysis"] = {{{"test", "clt"}, {"bootstraps", 5}}};
    CHECK(field_of(j) == "analysis[0].bootstraps");

    CHECK(field_of(minimal_doubling()).empty());
}

TEST_CASE("simulate: minimal run, overwrite refusal and replay") {
    Scratch s("simulate");
    auto cfg = s.write("cfg.json", minimal_doubling());
    std::ostringstream log;
    REQUIRE(cmd_simulate({cfg, {}, {}, false}, log) == kPass);
    const auto run = s.dir / "run";
    CHECK(fs::exists(run / "ensemble.csv"));
    auto summary = json::parse(slurp(run / "summary.json"));
    CHECK(summary["master_seed"] == 5);
    CHECK(summary["config_hash"].get<std::string>().size() == 16);
    auto ens = simulate::load_ensemble(run / "ensemble.bin");
    CHECK(ens.size() == 1);
    CHECK(ens.checkpoints().back() == 1000);

    const auto before = slurp(run / "ensemble.bin");
    CHECK(exit_of([&] { return cmd_simulate({cfg, {}, {}, false}, log); }) == kOverwrite);
    CHECK(slurp(run / "ensemble.bin") == before);
    CHECK(cmd_simulate({cfg, {}, {}, true}, log) == kPass);
    CHECK(slurp(run / "ensemble.bin") == before);

    // replaying the summary, from another working directory, reproduces the file
    CHECK(cmd_simulate({run / "summary.json", s.dir / "replay", {}, false}, log) == kPass);
    CHECK(slurp(s.dir / "replay" / "ensemble.bin") == before);
    CHECK(slurp(s.dir / "replay" / "ensemble.csv") == slurp(run / "ensemble.csv"));

    auto bad = minimal_doubling();
    bad["run"].erase("master_seed");
    auto bad_cfg = s.write("bad.json", bad);
    CHECK(exit_of([&] { return cmd_simulate({bad_cfg, {}, {}, false}, log); }) == kUsage);
    CHECK(!fs::exists(s.dir / "bad"));
}

TEST_CASE("simulate: output independent of worker count") {
    Scratch s("workers");
    auto cfg = s.write("cfg.json", two_state(64, 2000));
    std::ostringstream log;
    REQUIRE(cmd_simulate({cfg, s.dir / "w1", 1u, false}, log) == kPass);
    REQUIRE(cmd_simulate({cfg, s.dir / "w5", 5u, false}, log) == kPass);
    CHECK(slurp(s.dir / "w1" / "ensemble.bin") == slurp(s.dir / "w5" / "ensemble.bin"));
}

TEST_CASE("analyze: verdicts, curves and contract errors") {
    Scratch s("analyze");
    auto j = two_state(2000, 4096);
    j["analysis"] = {{{"test", "sigma"}},
                     {{"test", "clt"}, {"sigma", "exact"}, {"bootstrap", 49}},
                     {{"test", "char-fn"}, {"sigma", "exact"}, {"epsilon", 0.05}, {"u_max", 3.0}, {"points", 6}},
                     {{"test", "blocking"}, {"trajectories", 40}}};
    auto cfg = s.write("cfg.json", j);
    std::ostringstream log, out;
    REQUIRE(cmd_simulate({cfg, {}, {}, false}, log) == kPass);
    const auto ens = s.dir / "run" / "ensemble.bin";
    const auto verdicts = s.dir / "verdicts.json";
    int rc = cmd_analyze({cfg, ens, verdicts, 1u, false}, out, log);
    CHECK((rc == kPass || rc == kSoftFail));
    auto doc = json::parse(slurp(verdicts));
    REQUIRE(doc["verdicts"].size() == 4);
    CHECK(doc["verdicts"][0]["test"] == "sigma");
    CHECK(doc["verdicts"][1]["details"].contains("energy_p"));
    CHECK(fs::exists(s.dir / "verdicts.3.blocking.csv"));
    CHECK(fs::exists(s.dir / "verdicts.2.char-fn.csv"));
    // epsilon 0.05 trims |u| <= 0.05 sqrt(N) at small N and says so
    CHECK(log.str().find("warning") != std::string::npos);

    CHECK(exit_of([&] { return cmd_analyze({cfg, ens, verdicts, 1u, false}, out, log); }) == kOverwrite);

    auto mismatch = two_state(2000, 4096);
    mismatch["analysis"] = {{{"test", "clt"}, {"sigma", {{1.0, 0.0}, {0.0, 1.0}}}}};
    auto mcfg = s.write("mismatch.json", mismatch);
    CHECK(exit_of([&] { return cmd_analyze({mcfg, ens, {}, 1u, false}, out, log); }) == kUsage);

    auto tails = two_state(2000, 4096);
    tails["analysis"] = {{{"test", "tails"}}};
    auto tcfg = s.write("tails.json", tails);
    CHECK(exit_of([&] { return cmd_analyze({tcfg, ens, {}, 1u, false}, out, log); }) == kUsage);
}

TEST_CASE("couple subcommand") {
    Scratch s("couple");
    CoupleArgs a;
    a.n_max = 20'000;
    a.runs = 3;
    a.fit_lo = 100;
    a.out = s.dir / "c";
    std::ostringstream out, log;
    CHECK(cmd_couple(a, out, log) == kPass);
    auto j = json::parse(slurp(s.dir / "c" / "summary.json"));
    CHECK(j["summary"]["runs"] == 3);
    CHECK(fs::exists(s.dir / "c" / "run_0.csv"));
    CHECK(exit_of([&] { return cmd_couple(a, out, log); }) == kOverwrite);
}

TEST_CASE("horizon-check on the shipped tables") {
    std::ostringstream out;
    CHECK(cmd_horizon_check({fs::path(ASIPLAB_SOURCE_DIR) / "configs/triangular_r045.lorentz", 1024, 30.0}, out) ==
          kPass);
    CHECK(json::parse(out.str())["finite"] == true);

    Scratch s("horizon");
    std::ofstream(s.dir / "open.lorentz") << "lattice 1 0 0 1\nscatterer 0 0 0.2\n";
    out.str("");
    CHECK(cmd_horizon_check({s.dir / "open.lorentz", 256, 30.0}, out) == kSoftFail);
}
