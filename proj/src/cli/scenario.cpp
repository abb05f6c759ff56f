#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "hadflow/cli.hpp"

namespace hadflow {

namespace {

const std::set<std::string> kScenarioKeys = {"space",   "functional", "target",      "evaders", "points",
                                             "x0",      "t0",         "horizon",     "scheme",  "seed",
                                             "capture_eps", "levels", "substeps",    "h",       "pitch",
                                             "outputs"};

double number_field(const Json& doc, const std::string& key) {
    const auto& v = doc.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>()))
        throw ValidationError("field '" + key + "' must be a finite number");
    return v.get<double>();
}

double positive_field(const Json& doc, const std::string& key) {
    const double v = number_field(doc, key);
    if (!(v > 0.0)) throw ValidationError("field '" + key + "' must be positive");
    return v;
}

// Re-raise a nested validation error with the enclosing field name.
template <typename F>
auto within(const std::string& key, F&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError("field '" + key + "': " + e.what());
    }
}

std::string file_name(const Json& outputs, const std::string& key, std::string fallback) {
    if (!outputs.contains(key)) return fallback;
    const auto& v = outputs[key];
    if (!v.is_string() || v.get<std::string>().empty())
        throw ValidationError("field 'outputs." + key + "' must be a non-empty string");
    return v.get<std::string>();
}

}  // namespace

Scenario parse_scenario(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!kScenarioKeys.count(key)) throw ValidationError("unknown scenario field '" + key + "'");
    Scenario s;
    s.raw = doc;
    if (!doc.contains("space")) throw ValidationError("missing required field 'space'");
    s.space = within("space", [&] { return space_from_json(doc["space"]); });
    if (doc.contains("functional"))
        s.functional = within("functional", [&] { return functional_from_json(s.space, doc["functional"]); });
    if (doc.contains("target"))
        s.target = within("target", [&] { return target_from_json(s.space, doc["target"]); });
    if (doc.contains("evaders"))
        s.evaders = within("evaders", [&] { return evaders_from_json(s.space, doc["evaders"]); });
    if (doc.contains("points")) {
        const auto& pts = doc["points"];
        if (!pts.is_array() || pts.empty()) throw ValidationError("field 'points' must be a non-empty array");
        for (std::size_t i = 0; i < pts.size(); ++i)
            s.points.push_back(within("points[" + std::to_string(i) + "]", [&] { return s.space->point_from_json(pts[i]); }));
    }
    if (doc.contains("x0")) s.x0 = within("x0", [&] { return s.space->canonical(s.space->point_from_json(doc["x0"])); });
    if (doc.contains("t0")) s.t0 = number_field(doc, "t0");
    if (doc.contains("horizon")) {
        s.horizon = number_field(doc, "horizon");
        if (*s.horizon < 0.0) throw ValidationError("field 'horizon' must be >= 0");
    }
    if (doc.contains("scheme")) s.scheme = within("scheme", [&] { return scheme_from_json(doc["scheme"]); });
    if (doc.contains("seed")) {
        const auto& v = doc["seed"];
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ValidationError("field 'seed' must be a non-negative 64-bit integer");
        s.seed = v.get<std::uint64_t>();
    }
    if (doc.contains("capture_eps")) {
        s.capture_eps = number_field(doc, "capture_eps");
        if (s.capture_eps < 0.0) throw ValidationError("field 'capture_eps' must be >= 0");
    }
    if (doc.contains("levels")) {
        const auto& v = doc["levels"];
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
            throw ValidationError("field 'levels' must be [n_lo, n_hi] with integers");
        const auto lo = v[0].get<long long>();
        const auto hi = v[1].get<long long>();
        if (lo < 0 || lo > hi || hi > 20) throw ValidationError("field 'levels' must satisfy 0 <= n_lo <= n_hi <= 20");
        s.levels = std::pair<int, int>{static_cast<int>(lo), static_cast<int>(hi)};
    }
    if (doc.contains("substeps")) {
        const auto& v = doc["substeps"];
        if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1024)
            throw ValidationError("field 'substeps' must be an integer in [1, 1024]");
        s.substeps = v.get<int>();
    }
    if (doc.contains("h")) s.h = positive_field(doc, "h");
    if (doc.contains("pitch")) s.pitch = positive_field(doc, "pitch");
    if (doc.contains("outputs")) {
        const auto& o = doc["outputs"];
        if (!o.is_object()) throw ValidationError("field 'outputs' must be an object");
        for (const auto& [key, _] : o.items())
            if (key != "trajectory" && key != "report" && key != "table")
                throw ValidationError("unknown field 'outputs." + key + "'");
        s.trajectory_file = file_name(o, "trajectory", s.trajectory_file);
        s.report_file = file_name(o, "report", s.report_file);
        s.table_file = file_name(o, "table", s.table_file);
    }
    return s;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ContractError*>(&e)) return 3;
    if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const CapabilityError*>(&e) ||
        dynamic_cast<const RegionTooSmallError*>(&e))
        return 4;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const StepSizeError*>(&e) ||
        dynamic_cast<const UsageError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const DataError*>(&e) || dynamic_cast<const Json::exception*>(&e))
        return 2;
    return 1;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

}  // namespace hadflow
