#pragma once

// JSON and CSV serialization of check reports and instance specs.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "instances.hpp"
#include "verify.hpp"

namespace diskpot {

/// printf("%.17g"): round-trippable and locale-independent for the C locale.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline double number_from(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

} // namespace detail

inline void to_json(nlohmann::json& j, const CheckReport& r) {
    j = nlohmann::json{{"check_id", r.check_id},
                       {"statement", r.statement},
                       {"seed", r.seed},
                       {"points_tested", r.points_tested},
                       {"worst_margin", detail::number_or_null(r.worst_margin)},
                       {"worst_point", {{"re", r.worst_point.re}, {"im", r.worst_point.im}}},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed}};
}

inline void from_json(const nlohmann::json& j, CheckReport& r) {
    j.at("check_id").get_to(r.check_id);
    j.at("statement").get_to(r.statement);
    j.at("seed").get_to(r.seed);
    j.at("points_tested").get_to(r.points_tested);
    r.worst_margin = detail::number_from(j.at("worst_margin"));
    j.at("worst_point").at("re").get_to(r.worst_point.re);
    j.at("worst_point").at("im").get_to(r.worst_point.im);
    j.at("tolerance").get_to(r.tolerance);
    j.at("passed").get_to(r.passed);
}

inline void to_json(nlohmann::json& j, const SkippedCheck& s) {
    j = nlohmann::json{{"check_id", s.check_id}, {"seed", s.seed}, {"reason", s.reason}};
}

inline void from_json(const nlohmann::json& j, SkippedCheck& s) {
    j.at("check_id").get_to(s.check_id);
    j.at("seed").get_to(s.seed);
    j.at("reason").get_to(s.reason);
}

inline void to_json(nlohmann::json& j, const InstanceSpec& s) {
    j = nlohmann::json{{"family", s.family}, {"seed", s.seed}, {"params", s.params}};
}

inline void from_json(const nlohmann::json& j, InstanceSpec& s) {
    j.at("family").get_to(s.family);
    j.at("seed").get_to(s.seed);
    s.params.clear();
    if (j.contains("params")) {
        j.at("params").get_to(s.params);
    }
}

inline InstanceSpec parse_instance_spec(const std::string& text) { return nlohmann::json::parse(text).get<InstanceSpec>(); }

inline std::string instance_spec_json(const InstanceSpec& spec) { return nlohmann::json(spec).dump(); }

/// {"suite", "seed", "generator", "checks", "skipped"} plus an optional
/// "timestamp"; pretty-printed with a trailing newline.
inline std::string report_json(const SuiteResult& result, const std::string& suite, std::uint64_t seed,
                               const std::optional<std::string>& timestamp = std::nullopt) {
    nlohmann::json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["generator"] = std::string(generator_name);
    j["checks"] = result.checks;
    j["skipped"] = result.skipped;
    if (timestamp) {
        j["timestamp"] = *timestamp;
    }
    return j.dump(2) + "\n";
}

inline std::string report_csv(const SuiteResult& result) {
    std::ostringstream out;
    out << "check_id,seed,points,worst_margin,passed\n";
    for (const auto& r : result.checks) {
        out << r.check_id << ',' << r.seed << ',' << r.points_tested << ',' << format_double(r.worst_margin) << ','
            << (r.passed ? "true" : "false") << '\n';
    }
    return out.str();
}

} // namespace diskpot
