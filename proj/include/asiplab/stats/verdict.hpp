#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

namespace asiplab::stats {

enum class Status { pass, soft_pass, fail, inconclusive };

inline const char* status_name(Status s) noexcept {
    switch (s) {
        case Status::pass: return "pass";
        case Status::soft_pass: return "soft-pass";
        case Status::fail: return "fail";
        case Status::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Outcome of one statistical check, serialised as the JSON verdict object.
struct Verdict {
    std::string test;
    double statistic = 0.0;
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
    double threshold = std::numeric_limits<double>::quiet_NaN();
    Status status = Status::inconclusive;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const noexcept { return status == Status::pass || status == Status::soft_pass; }
};

inline nlohmann::json to_json(const Verdict& v) {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    return {{"test", v.test},
            {"statistic", num(v.statistic)},
            {"ci", {num(v.ci_low), num(v.ci_high)}},
            {"threshold", num(v.threshold)},
            {"status", status_name(v.status)},
            {"details", v.details}};
}

}  // namespace asiplab::stats
