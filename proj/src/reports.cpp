#include "evt/reports.hpp"

#include <cmath>

namespace evt {

json EstimateReport::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["estimator"] = estimator;
    j["value"] = value;
    j["k"] = k;
    if (ci) {
        j["ci"] = json{{"lo", ci->lo}, {"hi", ci->hi}, {"level", ci->level}};
    }
    json ex = json::object();
    for (const auto& [key, val] : extras) ex[key] = val;
    j["extras"] = std::move(ex);
    return j;
}

json SummaryStats::to_json() const {
    json j;
    j["reps"] = reps;
    j["mean"] = mean;
    j["se"] = se;
    j["sd"] = sd;
    j["min"] = min;
    j["q05"] = q05;
    j["q25"] = q25;
    j["median"] = median;
    j["q75"] = q75;
    j["q95"] = q95;
    j["max"] = max;
    return j;
}

Check Check::two_sided(std::string name, double observed, double target, double tol,
                       std::string note) {
    Check c;
    c.name = std::move(name);
    c.kind = "two_sided";
    c.observed = observed;
    c.target = target;
    c.tolerance = tol;
    c.pass = std::fabs(observed - target) <= tol;
    c.note = std::move(note);
    return c;
}

Check Check::one_sided(std::string name, double observed, double bound, double tol,
                       std::string note) {
    Check c;
    c.name = std::move(name);
    c.kind = "one_sided";
    c.observed = observed;
    c.target = bound;
    c.tolerance = tol;
    c.pass = observed <= bound + tol;
    c.note = std::move(note);
    return c;
}

Check Check::info(std::string name, double observed, std::string note) {
    Check c;
    c.name = std::move(name);
    c.kind = "info";
    c.observed = observed;
    c.pass = true;
    c.note = std::move(note);
    return c;
}

json Check::to_json() const {
    json j;
    j["name"] = name;
    j["kind"] = kind;
    j["observed"] = observed;
    if (kind != "info") {
        j["target"] = target;
        j["tolerance"] = tolerance;
    }
    j["pass"] = pass;
    if (!note.empty()) j["note"] = note;
    return j;
}

void ExperimentReport::add_check(Check c) {
    if (!c.pass) pass = false;
    checks.push_back(std::move(c));
}

json ExperimentReport::to_json(bool include_timing) const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = name;
    j["config"] = config;
    j["stats"] = stats.to_json();
    json cs = json::array();
    for (const Check& c : checks) cs.push_back(c.to_json());
    j["checks"] = std::move(cs);
    if (!details.is_null()) j["details"] = details;
    j["pass"] = pass;
    j["seed"] = seed;
    j["stream_rule"] = stream_rule;
    if (include_timing && (wall_time_s || timestamp_ms)) {
        json t = json::object();
        if (timestamp_ms) t["unix_ms"] = *timestamp_ms;
        if (wall_time_s) t["wall_s"] = *wall_time_s;
        j["timing"] = std::move(t);
    }
    return j;
}

} // namespace evt
