#include <doctest.h>

#include <cmath>

#include "evt/errors.hpp"
#include "evt/experiments.hpp"

using namespace evt;

TEST_CASE("registry") {
    const auto infos = experiment_registry();
    CHECK(infos.size() == 8);
    CHECK(experiment_exists("coupling-identity"));
    CHECK(experiment_exists("pwm"));
    CHECK_FALSE(experiment_exists("nope"));
    CHECK_THROWS_WITH_AS(experiment_defaults("nope"), doctest::Contains("registry:"),
                         domain_error);
}

TEST_CASE("config overrides") {
    ExperimentConfig cfg = experiment_defaults("pot-conditional");
    cfg.apply_overrides(json{{"reps", 64}, {"k", 32}, {"seed", 9}});
    CHECK(cfg.reps == 64);
    CHECK(cfg.k == 32);
    CHECK(cfg.seed == 9);
    CHECK_THROWS_WITH_AS(cfg.apply_overrides(json{{"bogus", 1}}),
                         doctest::Contains("unknown experiment config key 'bogus'"),
                         domain_error);
    CHECK_THROWS_AS(cfg.apply_overrides(json{{"reps", "many"}}), domain_error);
    CHECK_THROWS_AS(run_experiment("pot-conditional", json{{"reps", 1}}), domain_error);
}

TEST_CASE("reports are bit-stable across thread counts and reruns") {
    for (const char* name : {"pot-conditional", "weissman-coverage"}) {
        const json o1{{"reps", 100}, {"threads", 1}};
        const json o2{{"reps", 100}, {"threads", 4}};
        const std::string a = run_experiment(name, o1).to_json().dump();
        const std::string b = run_experiment(name, o2).to_json().dump();
        // thread count is part of the config echo; compare everything else
        CHECK(run_experiment(name, o1).to_json().dump() == a); // rerun, same bytes
        json ja = json::parse(a), jb = json::parse(b);
        ja["config"].erase("threads");
        jb["config"].erase("threads");
        CHECK(ja.dump() == jb.dump());
    }
}

TEST_CASE("verdicts are pure functions of the summaries") {
    ExperimentReport rep = run_experiment("pot-conditional", json{{"reps", 200}});
    CHECK(rep.pass);
    // re-evaluating a persisted check reproduces the verdict
    for (const Check& c : rep.checks) {
        if (c.kind == "two_sided")
            CHECK(c.pass == (std::fabs(c.observed - c.target) <= c.tolerance));
        else if (c.kind == "one_sided")
            CHECK(c.pass == (c.observed <= c.target + c.tolerance));
    }
    // an impossible tolerance policy flips the verdict
    const ExperimentReport fail =
        run_experiment("pot-conditional", json{{"reps", 200}, {"sigma_mult", 0.0}});
    CHECK_FALSE(fail.pass);
}

TEST_CASE("degenerate coupling cases") {
    const ExperimentReport rep = run_experiment(
        "coupling-identity",
        json{{"model", "pareto:alpha=2"}, {"model2", "pareto:alpha=2"}, {"reps", 50},
             {"n_list", json::array({5})}});
    CHECK(rep.pass);
    CHECK(rep.stats.mean == 0.0);
    CHECK(rep.stats.se == 0.0);
}

TEST_CASE("coupling identity holds for p = 2 as well") {
    const ExperimentReport rep = run_experiment(
        "coupling-identity", json{{"p", 2.0}, {"reps", 800}, {"n_list", json::array({40})}});
    CHECK(rep.pass);
    // reference W_2^2 = int (log(z)/2)^2 z^-2 dz = 1/2
    CHECK(rep.details["reference_wp_pow_p"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("hill-bound unconditional variant is offered and marked heuristic") {
    const ExperimentReport rep = run_experiment(
        "hill-bound", json{{"t", -1.0}, {"reps", 400}, {"k", 100}});
    CHECK(rep.checks.size() == 1);
    CHECK(rep.checks[0].note.find("heuristic") != std::string::npos);
}

TEST_CASE("weissman degenerate alpha = k/n is a note, not a failure") {
    const ExperimentReport rep = run_experiment(
        "weissman-coverage",
        json{{"n", 1000}, {"k", 100}, {"alpha", 0.1}, {"reps", 50}});
    CHECK(rep.pass);
    bool noted = false;
    for (const Check& c : rep.checks) noted |= (c.name == "degenerate_ci");
    CHECK(noted);
}

TEST_CASE("block-maxima experiment rejects models without a finite left endpoint") {
    CHECK_THROWS_AS(run_experiment("block-maxima",
                                   json{{"model", "vmodel:gamma=0.5,rho=-0.75,A0=0.5"},
                                        {"reps", 10}}),
                    capability_error);
}

TEST_CASE("pot-conditional on the exact Pareto model is identically zero") {
    const ExperimentReport rep = run_experiment(
        "pot-conditional", json{{"model", "pareto:alpha=2"}, {"reps", 50}});
    CHECK(rep.pass);
    CHECK(rep.stats.mean <= 1e-12);
    CHECK(rep.details["a_p_t"].get<double>() <= 1e-12);
}

TEST_CASE("hill-bound k = 1 degenerate smoke: finite, no assertion beyond that") {
    const ExperimentReport rep =
        run_experiment("hill-bound", json{{"k", 1}, {"reps", 200}});
    CHECK(std::isfinite(rep.details["w_distance_to_gaussian"].get<double>()));
    CHECK(std::isfinite(rep.details["bound"].get<double>()));
}

TEST_CASE("hill-bias lambda = 0 is the unbiased regime") {
    // exact model: no A at all
    const ExperimentReport up = run_experiment(
        "hill-bias", json{{"model", "unitpareto"}, {"lambda", 0.0}, {"reps", 300}, {"k", 400}});
    CHECK(up.pass);
    CHECK(std::fabs(up.stats.mean) <= 3.0 * up.stats.se);
    // second-order model: schedule pushes sqrt(k) A(n/k) to ~0.01
    const ExperimentReport hall = run_experiment(
        "hill-bias", json{{"lambda", 0.0}, {"reps", 300}, {"k", 400}});
    CHECK(hall.pass);
}

TEST_CASE("pwm refuses gamma >= 1/2") {
    CHECK_THROWS_AS(
        run_experiment("pwm", json{{"model", "hall:C=1,gamma=0.6,rho=-1,d=0.1"}, {"reps", 8}}),
        domain_error);
}

TEST_CASE("hill-bound on a second-order model with sqrt(k) a_p small") {
    const ExperimentReport rep = run_experiment(
        "hill-bound", json{{"model", "hall:C=1,gamma=0.5,rho=-1,d=0.25"},
                           {"k", 400}, {"t", 1e5}, {"reps", 1000}});
    CHECK(rep.pass); // normality within the bound
}

TEST_CASE("weissman standardized statistic centers under a vanishing-bias schedule") {
    const ExperimentReport rep = run_experiment(
        "weissman-coverage",
        json{{"model", "hall:C=1,gamma=0.5,rho=-1,d=0.25"}, {"n", 1000000}, {"k", 400},
             {"alpha", 1e-7}, {"reps", 800}});
    CHECK(rep.pass);
    const double mean = rep.details["standardized_statistic"]["mean"].get<double>();
    CHECK(std::fabs(mean) < 0.2); // informational: limit is centered Gaussian
}

TEST_CASE("pwm covariance oracle is reproducible bit-exactly") {
    const json overrides{{"k", 400}, {"reps", 60}};
    const ExperimentReport a = run_experiment("pwm", overrides);
    const ExperimentReport b = run_experiment("pwm", overrides);
    CHECK(a.details["gamma_oracle"]["G00"].get<double>() ==
          b.details["gamma_oracle"]["G00"].get<double>());
    CHECK(a.details["gamma_oracle"]["G01"].get<double>() ==
          b.details["gamma_oracle"]["G01"].get<double>());
    CHECK(a.details["gamma_oracle"]["G11"].get<double>() ==
          b.details["gamma_oracle"]["G11"].get<double>());
}
