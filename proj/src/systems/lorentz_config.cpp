#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "asiplab/common/error.hpp"
#include "asiplab/systems/lorentz.hpp"

namespace asiplab::systems {

namespace {

double parse_number(const std::string& token, int line) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || !std::isfinite(value))
        throw InputError("lorentz config line " + std::to_string(line) + ": bad number '" + token + "'");
    return value;
}

}  // namespace

LorentzConfig parse_lorentz_config(std::istream& in) {
    LorentzConfig config;
    bool have_lattice = false;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream fields(raw);
        std::string key;
        if (!(fields >> key)) continue;
        std::vector<double> values;
        for (std::string tok; fields >> tok;) values.push_back(parse_number(tok, line));

        auto expect = [&](std::size_t count) {
            if (values.size() != count)
                throw InputError("lorentz config line " + std::to_string(line) + ": '" + key + "' takes " +
                                 std::to_string(count) + " values");
        };
        if (key == "lattice") {
            expect(4);
            config.a1 = {values[0], values[1]};
            config.a2 = {values[2], values[3]};
            have_lattice = true;
        } else if (key == "scatterer") {
            expect(3);
            config.scatterers.push_back({{values[0], values[1]}, values[2]});
        } else if (key == "horizon_bound") {
            expect(1);
            config.horizon_bound = values[0];
        } else if (key == "search_cutoff") {
            expect(1);
            config.search_cutoff = values[0];
        } else if (key == "grazing_tolerance") {
            expect(1);
            config.grazing_tolerance = values[0];
        } else if (key == "geometry_tolerance") {
            expect(1);
            config.geometry_tolerance = values[0];
        } else {
            throw InputError("lorentz config line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    if (!have_lattice) throw InputError("lorentz config: missing 'lattice' line");
    config.validate();
    return config;
}

LorentzConfig load_lorentz_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lorentz config " + path.string());
    return parse_lorentz_config(in);
}

std::string format_lorentz_config(const LorentzConfig& config) {
    std::ostringstream out;
    out.precision(17);
    out << "lattice " << config.a1.x << ' ' << config.a1.y << ' ' << config.a2.x << ' ' << config.a2.y << '\n';
    for (const auto& s : config.scatterers)
        out << "scatterer " << s.center.x << ' ' << s.center.y << ' ' << s.radius << '\n';
    if (config.horizon_bound) out << "horizon_bound " << *config.horizon_bound << '\n';
    out << "search_cutoff " << config.search_cutoff << '\n';
    out << "grazing_tolerance " << config.grazing_tolerance << '\n';
    out << "geometry_tolerance " << config.geometry_tolerance << '\n';
    return out.str();
}

}  // namespace asiplab::systems
