#ifndef EVT_REPORTS_HPP
#define EVT_REPORTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace evt {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1729;
constexpr int kSchemaVersion = 1;

/// Estimator output: point value, effective sample size, optional CI,
/// key-value diagnostics.
struct EstimateReport {
    struct Ci {
        double lo = 0.0;
        double hi = 0.0;
        double level = 0.0;
    };

    std::string estimator;
    double value = 0.0;
    std::size_t k = 0;
    std::optional<Ci> ci;
    std::vector<std::pair<std::string, double>> extras;

    json to_json() const;
};

struct SummaryStats {
    std::size_t reps = 0;
    double mean = 0.0;
    double se = 0.0; // sample std / sqrt(reps)
    double sd = 0.0;
    double min = 0.0;
    double q05 = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
    double max = 0.0;

    json to_json() const;
};

/// One verification clause of an experiment.
///   two_sided: pass iff |observed - target| <= tolerance
///   one_sided: pass iff observed <= target + tolerance
///   info:      recorded, never fails
struct Check {
    std::string name;
    std::string kind;
    double observed = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::string note;

    static Check two_sided(std::string name, double observed, double target, double tol,
                           std::string note = {});
    static Check one_sided(std::string name, double observed, double bound, double tol,
                           std::string note = {});
    static Check info(std::string name, double observed, std::string note = {});

    json to_json() const;
};

/// Replicated Monte Carlo summary. Bit-identical for identical (config,
/// seed) at any thread count; wall time and timestamp live in the optional
/// timing block, which is outside the determinism contract.
struct ExperimentReport {
    std::string name;
    json config; // resolved config echo
    SummaryStats stats;
    std::vector<Check> checks;
    json details; // references, bounds, secondary summaries
    bool pass = true;
    std::uint64_t seed = kDefaultSeed;
    std::string stream_rule = "splitmix64 stream(seed, replicate_index)";
    std::optional<double> wall_time_s;
    std::optional<std::int64_t> timestamp_ms;
    std::vector<double> replicate_stats; // primary per-replicate statistic (not serialized)

    void add_check(Check c);
    json to_json(bool include_timing = false) const;
};

} // namespace evt

#endif
