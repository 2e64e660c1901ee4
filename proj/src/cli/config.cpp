#include "asiplab/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "asiplab/common/random.hpp"

namespace asiplab::cli {

namespace {

using nlohmann::json;

void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(path, "must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "required field is missing");
    return obj.at(key);
}

std::string field(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

std::uint64_t as_count(const json& v, const std::string& path, std::uint64_t min = 0) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        auto x = v.get<std::uint64_t>();
        if (x < min) throw ConfigError(path, "must be at least " + std::to_string(min));
        return x;
    }
    if (v.is_number_integer()) throw ConfigError(path, "must be non-negative");
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d >= static_cast<double>(min) && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
        throw ConfigError(path, "must be an integer >= " + std::to_string(min));
    }
    throw ConfigError(path, "must be a number");
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "must be a string");
    return v.get<std::string>();
}

std::vector<double> as_vector(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "must be a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

SystemConfig parse_system(const json& j) {
    const std::string p = "system";
    SystemConfig s;
    s.kind = as_string(require(j, p, "kind"), field(p, "kind"));
    if (s.kind == "two-state") {
        allow_only(j, p, {"kind", "flip"});
        if (j.contains("flip")) s.flip = as_number(j["flip"], field(p, "flip"));
        if (!(s.flip > 0.0 && s.flip < 1.0)) throw ConfigError(field(p, "flip"), "must lie in (0, 1)");
    } else if (s.kind == "full-shift") {
        allow_only(j, p, {"kind", "symbols"});
        if (j.contains("symbols")) s.symbols = static_cast<int>(as_count(j["symbols"], field(p, "symbols"), 2));
        if (s.symbols > 64) throw ConfigError(field(p, "symbols"), "at most 64 symbols");
    } else if (s.kind == "markov") {
        allow_only(j, p, {"kind", "matrix"});
        const auto& m = require(j, p, "matrix");
        if (!m.is_array() || m.empty()) throw ConfigError(field(p, "matrix"), "must be a square array of rows");
        for (std::size_t i = 0; i < m.size(); ++i) {
            s.matrix.push_back(as_vector(m[i], field(p, "matrix") + "[" + std::to_string(i) + "]"));
            if (s.matrix.back().size() != m.size()) throw ConfigError(field(p, "matrix"), "must be square");
        }
    } else if (s.kind == "doubling") {
        allow_only(j, p, {"kind"});
    } else if (s.kind == "lsv") {
        allow_only(j, p, {"kind", "gamma", "burn_in"});
        s.gamma = as_number(require(j, p, "gamma"), field(p, "gamma"));
        if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw ConfigError(field(p, "gamma"), "must lie in (0, 1)");
        if (j.contains("burn_in")) s.burn_in = as_count(j["burn_in"], field(p, "burn_in"));
    } else if (s.kind == "lorentz") {
        allow_only(j, p, {"kind", "table", "waive_horizon"});
        s.table = as_string(require(j, p, "table"), field(p, "table"));
        if (j.contains("waive_horizon")) {
            if (!j["waive_horizon"].is_boolean()) throw ConfigError(field(p, "waive_horizon"), "must be a boolean");
            s.waive_horizon = j["waive_horizon"].get<bool>();
        }
    } else {
        throw ConfigError(field(p, "kind"), "unknown system '" + s.kind +
                                                "' (two-state, full-shift, markov, doubling, lsv, lorentz)");
    }
    return s;
}

bool is_markov(const std::string& kind) { return kind == "two-state" || kind == "full-shift" || kind == "markov"; }

ObservableConfig parse_observable(const json& j, const SystemConfig& sys) {
    const std::string p = "observable";
    ObservableConfig o;
    o.kind = as_string(require(j, p, "kind"), field(p, "kind"));
    auto mismatch = [&] { return ConfigError(field(p, "kind"), "'" + o.kind + "' is not defined on system " + sys.kind); };
    if (o.kind == "pm1") {
        allow_only(j, p, {"kind"});
        if (!is_markov(sys.kind)) throw mismatch();
    } else if (o.kind == "symbol") {
        allow_only(j, p, {"kind", "values"});
        if (!is_markov(sys.kind)) throw mismatch();
        o.values = as_vector(require(j, p, "values"), field(p, "values"));
        std::size_t n = sys.kind == "two-state" ? 2 : sys.kind == "full-shift" ? sys.symbols : sys.matrix.size();
        if (o.values.size() != n) throw ConfigError(field(p, "values"), "needs one value per symbol");
    } else if (o.kind == "cos2pi") {
        allow_only(j, p, {"kind"});
        if (sys.kind != "doubling") throw mismatch();
    } else if (o.kind == "identity") {
        allow_only(j, p, {"kind", "pilot_steps"});
        if (sys.kind != "lsv") throw mismatch();
        if (j.contains("pilot_steps")) o.pilot_steps = as_count(j["pilot_steps"], field(p, "pilot_steps"), 1);
    } else if (o.kind == "position") {
        allow_only(j, p, {"kind"});
        if (sys.kind != "lorentz") throw mismatch();
    } else {
        throw ConfigError(field(p, "kind"), "unknown observable '" + o.kind + "' (pm1, symbol, cos2pi, identity, position)");
    }
    return o;
}

RunConfig parse_run(const json& j) {
    const std::string p = "run";
    allow_only(j, p, {"n_max", "checkpoints", "trajectories", "master_seed", "workers"});
    RunConfig r;
    r.n_max = as_count(require(j, p, "n_max"), field(p, "n_max"), 1);
    r.master_seed = as_count(require(j, p, "master_seed"), field(p, "master_seed"));
    if (j.contains("trajectories")) r.trajectories = as_count(j["trajectories"], field(p, "trajectories"), 1);
    if (j.contains("workers")) {
        auto w = as_count(j["workers"], field(p, "workers"), 1);
        if (w > 256) throw ConfigError(field(p, "workers"), "at most 256");
        r.workers = static_cast<unsigned>(w);
    }
    if (j.contains("checkpoints")) {
        const auto& c = j["checkpoints"];
        if (!c.is_array() || c.empty()) throw ConfigError(field(p, "checkpoints"), "must be a nonempty array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto path = field(p, "checkpoints") + "[" + std::to_string(i) + "]";
            auto v = as_count(c[i], path, 1);
            if (v > r.n_max) throw ConfigError(path, "exceeds run.n_max");
            if (!r.checkpoints.empty() && v <= r.checkpoints.back()) throw ConfigError(path, "checkpoints must increase");
            r.checkpoints.push_back(v);
        }
    }
    return r;
}

const std::map<std::string, std::vector<std::string>>& key_table() {
    static const std::map<std::string, std::vector<std::string>> t{
        {"sigma", {"test", "N"}},
        {"clt", {"test", "N", "sigma", "bootstrap", "alpha", "seed"}},
        {"char-fn", {"test", "sigma", "epsilon", "u_max", "points", "checkpoints", "slack"}},
        {"blocking", {"test", "Q", "alpha", "trajectories", "slack"}},
        {"lil", {"test", "sigma", "lo", "hi"}},
        {"tails", {"test", "p", "samples", "seed"}},
        {"mixing", {"test", "a", "b", "lags", "trajectories", "length"}},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& analysis_keys(const std::string& test) {
    auto it = key_table().find(test);
    if (it == key_table().end()) throw ConfigError("analysis", "unknown test '" + test + "'");
    return it->second;
}

std::string ExperimentConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::filesystem::path ExperimentConfig::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

ExperimentConfig parse_config(const json& raw, const std::filesystem::path& base_dir) {
    allow_only(raw, "", {"system", "observable", "run", "analysis", "output"});
    ExperimentConfig c;
    c.raw = raw;
    c.base_dir = base_dir;
    c.system = parse_system(require(raw, "", "system"));
    c.observable = parse_observable(require(raw, "", "observable"), c.system);
    c.run = parse_run(require(raw, "", "run"));
    if (raw.contains("analysis")) {
        const auto& a = raw["analysis"];
        if (!a.is_array()) throw ConfigError("analysis", "must be an array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = "analysis[" + std::to_string(i) + "]";
            if (!a[i].is_object()) throw ConfigError(p, "must be an object");
            AnalysisConfig ac;
            ac.test = as_string(require(a[i], p, "test"), field(p, "test"));
            const auto& keys = analysis_keys(ac.test);
            for (const auto& [k, v] : a[i].items())
                if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError(p + "." + k, "unknown key");
            ac.params = a[i];
            c.analyses.push_back(std::move(ac));
        }
    }
    if (raw.contains("output")) {
        allow_only(raw["output"], "output", {"dir"});
        c.output_dir = as_string(require(raw["output"], "output", "dir"), "output.dir");
    }
    const std::string canon = raw.dump();
    c.hash = fnv1a64(canon.data(), canon.size());
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("not valid JSON: ") + e.what());
    }
    std::filesystem::path base = path.parent_path();
    if (raw.is_object() && raw.contains("config") && raw.contains("config_hash")) {
        if (raw.contains("base_dir") && raw["base_dir"].is_string()) base = raw["base_dir"].get<std::string>();
        json inner = raw["config"];
        raw = std::move(inner);
    }
    return parse_config(raw, base);
}

}  // namespace asiplab::cli
