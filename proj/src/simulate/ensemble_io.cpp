#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "asiplab/simulate/ensemble.hpp"

namespace asiplab::simulate {

static_assert(std::endian::native == std::endian::little, "binary ensemble format assumes little-endian hosts");

namespace {

constexpr char kMagic[8] = {'A', 'S', 'I', 'P', 'E', 'N', 'S', '1'};
constexpr std::uint32_t kVersion = 2;

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }
    template <class T>
    void put(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    template <class T>
    void put_array(const std::vector<T>& v) {
        out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
    }
    void put_string(const std::string& s) {
        put(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void finish(const std::filesystem::path& path) {
        out_.flush();
        if (!out_) throw IoError("write failed for " + path.string());
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw IoError("cannot open " + path.string());
    }
    void raw(char* p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) throw IoError("truncated ensemble file " + path_.string());
    }
    template <class T>
    T get() {
        T v;
        raw(reinterpret_cast<char*>(&v), sizeof v);
        return v;
    }
    template <class T>
    void get_array(std::vector<T>& v, std::uint64_t n) {
        // guard against absurd sizes from a corrupted header before allocating
        if (n > (std::uint64_t{1} << 40) / sizeof(T)) throw IoError("corrupt ensemble file " + path_.string());
        v.resize(n);
        raw(reinterpret_cast<char*>(v.data()), n * sizeof(T));
    }
    std::string get_string() {
        const auto n = get<std::uint32_t>();
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::ifstream in_;
    std::filesystem::path path_;
};

}  // namespace

void save_ensemble(const EnsembleResult& result, const std::filesystem::path& path) {
    Writer w(path);
    w.raw(kMagic, sizeof kMagic);
    w.put(kVersion);
    w.put(result.master_seed);
    w.put_string(result.system);
    w.put_string(result.observable);
    w.put(static_cast<std::uint64_t>(result.trajectories.size()));
    for (const auto& t : result.trajectories) {
        w.put(t.seed);
        w.put(static_cast<std::int32_t>(t.dim));
        w.put(static_cast<std::uint64_t>(t.checkpoints.size()));
        w.put_array(t.checkpoints);
        w.put(static_cast<std::uint64_t>(t.sums.size()));
        w.put_array(t.sums);
    }
    w.put(static_cast<std::uint64_t>(result.failures.size()));
    for (const auto& f : result.failures) {
        w.put(f.index);
        w.put_string(f.message);
    }
    w.finish(path);
}

EnsembleResult load_ensemble(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError(path.string() + " is not an ensemble file");
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion)
        throw IoError("ensemble file version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kVersion) + ")");
    EnsembleResult result;
    result.master_seed = r.get<std::uint64_t>();
    result.system = r.get_string();
    result.observable = r.get_string();
    const auto k = r.get<std::uint64_t>();
    if (k > (std::uint64_t{1} << 32)) throw IoError("corrupt ensemble file " + path.string());
    result.trajectories.resize(k);
    for (auto& t : result.trajectories) {
        t.seed = r.get<std::uint64_t>();
        t.dim = r.get<std::int32_t>();
        r.get_array(t.checkpoints, r.get<std::uint64_t>());
        r.get_array(t.sums, r.get<std::uint64_t>());
    }
    const auto nf = r.get<std::uint64_t>();
    if (nf > k) throw IoError("corrupt ensemble file " + path.string());
    for (std::uint64_t i = 0; i < nf; ++i) {
        TrajectoryFailure f;
        f.index = r.get<std::uint64_t>();
        f.message = r.get_string();
        result.failures.push_back(std::move(f));
    }
    if (!r.at_end()) throw IoError("trailing data in ensemble file " + path.string());
    return result;
}

void export_csv(const EnsembleResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const int d = result.dim();
    out << "N";
    for (int c = 1; c <= d; ++c) out << ",S_" << c;
    out << ",seed\n";
    char buf[40];
    for (const auto& t : result.trajectories) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << t.checkpoints[i];
            for (int c = 0; c < d; ++c) {
                std::snprintf(buf, sizeof buf, ",%.17g", t.at(i, c));
                out << buf;
            }
            out << ',' << t.seed << '\n';
        }
    }
    if (!out) throw IoError("write failed for " + path.string());
}

EnsembleResult import_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("N,", 0) != 0) throw IoError(path.string() + ": missing CSV header");
    int d = 0;
    for (char ch : line) d += ch == ',';
    d -= 1;
    if (d < 1) throw IoError(path.string() + ": CSV header has no S columns");

    EnsembleResult result;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
            fields.push_back(rest.substr(0, pos));
        fields.push_back(rest);
        if (static_cast<int>(fields.size()) != d + 2)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": wrong field count");
        auto parse = [&](std::string_view f, auto& v) {
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || p != f.data() + f.size())
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad field '" + std::string(f) + "'");
        };
        std::uint64_t n = 0, seed = 0;
        parse(fields.front(), n);
        parse(fields.back(), seed);
        if (result.trajectories.empty() || result.trajectories.back().seed != seed) {
            result.trajectories.emplace_back();
            result.trajectories.back().seed = seed;
            result.trajectories.back().dim = d;
        }
        auto& t = result.trajectories.back();
        t.checkpoints.push_back(n);
        for (int c = 0; c < d; ++c) {
            double v = 0.0;
            parse(fields[static_cast<std::size_t>(c) + 1], v);
            t.sums.push_back(v);
        }
    }
    for (const auto& t : result.trajectories) t.validate();
    return result;
}

nlohmann::json ensemble_summary(const EnsembleResult& result) {
    nlohmann::json j;
    j["system"] = result.system;
    j["observable"] = result.observable;
    j["master_seed"] = result.master_seed;
    j["trajectories"] = result.trajectories.size();
    std::vector<std::uint64_t> seeds;
    seeds.reserve(result.trajectories.size());
    for (const auto& t : result.trajectories) seeds.push_back(t.seed);
    j["seeds"] = seeds;
    if (result.trajectories.size() > result.failures.size()) {
        j["checkpoints"] = result.checkpoints();
        j["dimension"] = result.dim();
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : result.failures) failures.push_back({{"index", f.index}, {"message", f.message}});
    j["failures"] = failures;
    j["wall_seconds"] = result.wall_seconds;
    return j;
}

}  // namespace asiplab::simulate
