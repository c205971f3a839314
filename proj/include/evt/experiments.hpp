#ifndef EVT_EXPERIMENTS_HPP
#define EVT_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "evt/reports.hpp"

namespace evt {

/// Configuration of a registered experiment. Fields not used by a given
/// experiment are ignored; the registry provides per-experiment defaults.
struct ExperimentConfig {
    std::string name;
    std::string model;
    std::string model2;
    std::vector<std::size_t> n_list; // coupling identity sweeps over sample sizes
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t m = 0;
    double t = 0.0;
    double p = 1.0;
    double alpha = 0.0;
    double level = 0.95;
    double lambda = 0.0;
    std::string metric = "log";
    std::size_t reps = 0;
    std::uint64_t seed = kDefaultSeed;
    double sigma_mult = 3.0; // tolerance policy for two-sided statistical checks
    int threads = 0;

    json to_json() const;
    /// Applies the keys present in `overrides` on top of *this; unknown keys
    /// are an error.
    void apply_overrides(const json& overrides);
};

struct ExperimentInfo {
    std::string name;
    std::string description;
};

std::vector<ExperimentInfo> experiment_registry();
bool experiment_exists(const std::string& name);
ExperimentConfig experiment_defaults(const std::string& name);

/// Runs the named experiment; cfg.name selects the runner.
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const std::string& name, const json& overrides);

} // namespace evt

#endif
