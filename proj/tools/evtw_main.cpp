// evtw: simulation, tail estimation, functional evaluation and Monte Carlo
// experiments for heavy-tail statistics.
//
// Exit codes: 0 pass, 1 statistical fail, 2 usage/config error, 3 data
// error, 4 numeric singularity. All randomness flows from --seed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evt/bm.hpp"
#include "evt/errors.hpp"
#include "evt/experiments.hpp"
#include "evt/models.hpp"
#include "evt/pot.hpp"
#include "evt/reports.hpp"

namespace {

using evt::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw evt::data_error("cannot open output file '" + out_path + "'");
    f << text;
}

std::vector<double> read_value_column(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw evt::data_error("cannot open input file '" + path + "'");
    std::vector<double> values;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        const std::string item = line.substr(start);
        if (!header_seen) {
            if (item != "value")
                throw evt::data_error("input '" + path + "': expected header 'value', got '" +
                                      item + "'");
            header_seen = true;
            continue;
        }
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw evt::data_error("input '" + path + "' line " + std::to_string(lineno) +
                                  ": cannot parse '" + item + "'");
        }
    }
    if (!header_seen) throw evt::data_error("input '" + path + "': missing 'value' header");
    if (values.empty()) throw evt::data_error("input '" + path + "': no data rows");
    return values;
}

evt::Sample sample_from_file(const std::string& path) {
    evt::Sample s;
    s.values = read_value_column(path);
    std::sort(s.values.begin(), s.values.end());
    s.model_tag = "file:" + path;
    return s;
}

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    bool log_spaced = false;
};

// "lo:hi[:count][:log]"; count defaults to 50
GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (!parts.empty() && parts.back() == "log") {
        g.log_spaced = true;
        parts.pop_back();
    }
    if (parts.size() < 2 || parts.size() > 3)
        throw evt::domain_error("grid must be lo:hi[:count][:log], got '" + s + "'");
    try {
        g.lo = std::stod(parts[0]);
        g.hi = std::stod(parts[1]);
        g.count = parts.size() == 3 ? static_cast<std::size_t>(std::stoul(parts[2])) : 50;
    } catch (const std::exception&) {
        throw evt::domain_error("cannot parse grid '" + s + "'");
    }
    if (g.count < 1 || !(g.hi >= g.lo)) throw evt::domain_error("bad grid '" + s + "'");
    return g;
}

// "lo:hi:step" over integers
std::vector<std::size_t> parse_k_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
        throw evt::domain_error("k-grid must be lo:hi:step, got '" + s + "'");
    std::size_t lo = 0, hi = 0, step = 0;
    try {
        lo = static_cast<std::size_t>(std::stoul(parts[0]));
        hi = static_cast<std::size_t>(std::stoul(parts[1]));
        step = static_cast<std::size_t>(std::stoul(parts[2]));
    } catch (const std::exception&) {
        throw evt::domain_error("cannot parse k-grid '" + s + "'");
    }
    if (lo < 1 || hi < lo || step < 1) throw evt::domain_error("bad k-grid '" + s + "'");
    std::vector<std::size_t> ks;
    for (std::size_t k = lo; k <= hi; k += step) ks.push_back(k);
    return ks;
}

std::vector<double> grid_points(const GridSpec& g) {
    std::vector<double> pts;
    if (g.count == 1) return {g.lo};
    for (std::size_t i = 0; i < g.count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(g.count - 1);
        pts.push_back(g.log_spaced ? g.lo * std::pow(g.hi / g.lo, f)
                                   : g.lo + (g.hi - g.lo) * f);
    }
    return pts;
}

int cmd_simulate(const std::string& model_spec, std::size_t n, std::uint64_t seed,
                 const std::string& out) {
    const evt::TailModel model = evt::parse_model_spec(model_spec);
    const evt::Sample s = model.sample(n, seed);
    std::string text = "value\n";
    for (double v : s.values) {
        text += fmt17(v);
        text += '\n';
    }
    write_text(out, text);
    return 0;
}

int cmd_estimate(const std::string& kind, const std::string& input, std::size_t k, double alpha,
                 double level, double scale, const std::string& k_grid,
                 const std::string& format, const std::string& out) {
    const evt::Sample s = sample_from_file(input);
    auto run_one = [&](std::size_t kk) -> evt::EstimateReport {
        if (kind == "hill") return evt::hill(s, kk);
        if (kind == "weissman") return evt::weissman(s, kk, alpha, level);
        if (kind == "pwm") return evt::pwm_gp(s, kk, scale);
        throw evt::domain_error("unknown estimator '" + kind + "'");
    };

    if (!k_grid.empty()) {
        std::string text = "k,estimate\n";
        for (std::size_t kk : parse_k_grid(k_grid)) {
            const auto r = run_one(kk);
            text += std::to_string(kk) + "," + fmt17(r.value) + "\n";
        }
        write_text(out, text);
        return 0;
    }

    const evt::EstimateReport r = run_one(k);
    if (format == "csv") {
        std::string text = "key,value\nestimator," + r.estimator + "\nvalue," + fmt17(r.value) +
                           "\nk," + std::to_string(r.k) + "\n";
        if (r.ci)
            text += "ci_lo," + fmt17(r.ci->lo) + "\nci_hi," + fmt17(r.ci->hi) + "\nci_level," +
                    fmt17(r.ci->level) + "\n";
        for (const auto& [key, val] : r.extras)
            if (key != "k") text += key + "," + fmt17(val) + "\n";
        write_text(out, text);
    } else {
        write_text(out, r.to_json().dump(2) + "\n");
    }
    return 0;
}

int cmd_functional(const std::string& kind, const std::string& model_spec, double p,
                   double gamma, std::optional<double> rho, const std::string& rho_grid,
                   std::optional<double> t, const std::string& t_grid, std::optional<double> x,
                   const std::string& x_grid, std::size_t n, std::size_t k,
                   const std::string& out) {
    const evt::QuadratureSpec quad;
    std::string text;
    auto append_row = [&text](double xv, double value, double err) {
        text += fmt17(xv);
        text += ',';
        text += fmt17(value);
        text += ',';
        text += fmt17(err);
        text += '\n';
    };
    auto points_for = [](std::optional<double> single, const std::string& grid, double dflt) {
        if (!grid.empty()) return grid_points(parse_grid(grid));
        return std::vector<double>{single.value_or(dflt)};
    };

    if (kind == "ap" || kind == "ap-prime" || kind == "ap-2prime") {
        if (model_spec.empty()) throw evt::domain_error("functional " + kind + ": --model required");
        const evt::TailModel model = evt::parse_model_spec(model_spec);
        text = "t,value,error\n";
        for (double tv : points_for(t, t_grid, 10.0)) {
            evt::QuadResult r;
            if (kind == "ap")
                r = evt::a_p_result(model, tv, p, quad);
            else if (kind == "ap-prime")
                r = evt::a_p_prime_result(model, tv, p, quad);
            else
                r = evt::a_p_doubleprime_result(model, tv, p, quad);
            append_row(tv, r.value, r.error);
        }
    } else if (kind == "cp") {
        text = "rho,value,error\n";
        for (double rv : points_for(rho, rho_grid, -1.0)) {
            if (std::isinf(p) || p == 1.0 || p == 2.0)
                append_row(rv, evt::c_p(rv, p, quad), 0.0);
            else {
                const auto r = evt::c_p_quadrature_result(rv, p, quad);
                append_row(rv, r.value, r.error);
            }
        }
    } else if (kind == "cp-prime") {
        text = "rho,value,error\n";
        for (double rv : points_for(rho, rho_grid, -1.0)) {
            const auto r = evt::c_p_prime_result(gamma, rv, p, quad);
            append_row(rv, r.value, r.error);
        }
    } else if (kind == "cp-2prime") {
        text = "rho,value,error\n";
        for (double rv : points_for(rho, rho_grid, -1.0)) {
            const auto r = evt::c_p_doubleprime_result(gamma, rv, p, quad);
            append_row(rv, r.value, r.error);
        }
    } else if (kind == "b") {
        text = "rho,value,error\n";
        for (double rv : points_for(rho, rho_grid, -1.0)) append_row(rv, evt::bias_b(rv), 0.0);
    } else if (kind == "psi") {
        text = "x,value,error\n";
        for (double xv : points_for(x, x_grid, 2.0))
            append_row(xv, evt::psi(gamma, rho.value_or(-1.0), xv), 0.0);
    } else if (kind == "beta-bound") {
        if (model_spec.empty())
            throw evt::domain_error("functional beta-bound: --model required");
        const evt::TailModel model = evt::parse_model_spec(model_spec);
        const auto r = evt::beta_mixture_bound_result(model, n, k, p, quad);
        text = "k,value,error\n";
        append_row(static_cast<double>(k), r.value, r.error);
    } else {
        throw evt::domain_error("unknown functional '" + kind + "'");
    }
    write_text(out, text);
    return 0;
}

int cmd_experiment(const std::string& name, const std::string& config_path, const json& overrides,
                   bool list, bool no_timing, const std::string& replicates_csv,
                   const std::string& out) {
    if (list) {
        std::string text;
        for (const auto& info : evt::experiment_registry())
            text += info.name + "\t" + info.description + "\n";
        write_text(out, text);
        return 0;
    }
    evt::ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw evt::domain_error("cannot open config '" + config_path + "'");
        json doc;
        try {
            doc = json::parse(f);
        } catch (const json::exception& e) {
            throw evt::domain_error("config '" + config_path + "' is not valid JSON: " + e.what());
        }
        if (!doc.contains("name")) throw evt::domain_error("config missing 'name'");
        cfg = evt::experiment_defaults(doc["name"].get<std::string>());
        doc.erase("name");
        cfg.apply_overrides(doc);
    } else if (!name.empty()) {
        cfg = evt::experiment_defaults(name);
    } else {
        throw evt::domain_error("experiment: give a registry name or --config");
    }
    cfg.apply_overrides(overrides);

    const auto t0 = std::chrono::steady_clock::now();
    evt::ExperimentReport report = evt::run_experiment(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    report.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    report.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();

    write_text(out, report.to_json(!no_timing).dump(2) + "\n");
    if (!replicates_csv.empty()) {
        std::string text = "rep,stat\n";
        for (std::size_t i = 0; i < report.replicate_stats.size(); ++i)
            text += std::to_string(i) + "," + fmt17(report.replicate_stats[i]) + "\n";
        write_text(replicates_csv, text);
    }
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-tail statistics: simulation, estimators, Wasserstein functionals, "
                 "seeded Monte Carlo experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = evt::kDefaultSeed; // fixed default, never time-based
    std::string out, format = "json";
    int threads = 0;
    app.add_option("--seed", seed, "master seed (default " + std::to_string(evt::kDefaultSeed) + ")");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "json|csv (estimate reports)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", threads, "worker threads for experiments (0 = hardware)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw a sample and write one value per line");
    std::string sim_model;
    std::size_t sim_n = 0;
    sim->add_option("--model", sim_model, "model spec, e.g. hall:C=1,gamma=0.5,rho=-1,d=1")
        ->required();
    sim->add_option("--n", sim_n, "sample size (>= 1)")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "run an estimator on a value file");
    std::string est_kind, est_input, est_kgrid;
    std::size_t est_k = 0;
    double est_alpha = 0.01, est_level = 0.95, est_scale = 1.0;
    est->add_option("kind", est_kind, "hill|weissman|pwm")->required();
    est->add_option("--input", est_input, "CSV with a 'value' header")->required();
    est->add_option("--k", est_k, "number of top order statistics");
    est->add_option("--alpha", est_alpha, "extreme quantile level (weissman)");
    est->add_option("--level", est_level, "CI level (weissman)");
    est->add_option("--scale", est_scale, "normalizing scale (pwm)");
    est->add_option("--k-grid", est_kgrid, "lo:hi:count[:log] -> CSV of (k, estimate)");

    // functional
    auto* fun = app.add_subcommand("functional", "evaluate A_p/c_p-type functionals to CSV");
    std::string fun_kind, fun_model, fun_tgrid, fun_rhogrid, fun_xgrid;
    double fun_p = 1.0, fun_gamma = 0.0, fun_rho = 0.0, fun_t = 0.0, fun_x = 0.0;
    std::size_t fun_n = 0, fun_k = 0;
    fun->add_option("kind", fun_kind, "ap|ap-prime|ap-2prime|cp|cp-prime|cp-2prime|b|psi|beta-bound")
        ->required();
    fun->add_option("--model", fun_model, "model spec (ap family, beta-bound)");
    fun->add_option("--p", fun_p, "order p >= 1 ('inf' via --p-inf)");
    fun->add_flag_callback("--p-inf", [&fun_p]() { fun_p = INFINITY; }, "use p = infinity");
    fun->add_option("--gamma", fun_gamma, "gamma (psi, cp-prime, cp-2prime)");
    fun->add_option("--rho", fun_rho, "rho (<= 0)");
    fun->add_option("--rho-grid", fun_rhogrid, "lo:hi:count[:log]");
    fun->add_option("--t", fun_t, "threshold argument");
    fun->add_option("--t-grid", fun_tgrid, "lo:hi:count[:log]");
    fun->add_option("--x", fun_x, "psi argument");
    fun->add_option("--x-grid", fun_xgrid, "lo:hi:count[:log]");
    fun->add_option("--n", fun_n, "sample size (beta-bound)");
    fun->add_option("--k", fun_k, "top order statistics (beta-bound)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a registered Monte Carlo experiment");
    std::string exp_name, exp_config, exp_repcsv;
    bool exp_list = false, exp_no_timing = false;
    json overrides = json::object();
    exp->add_option("name", exp_name, "registry name (see --list)");
    exp->add_option("--config", exp_config, "JSON config file (must contain 'name')");
    exp->add_flag("--list", exp_list, "list registered experiments");
    exp->add_flag("--no-timing", exp_no_timing, "omit the timing block from the report");
    exp->add_option("--replicates-csv", exp_repcsv, "also write per-replicate stats to CSV");
    std::map<std::string, std::string> exp_str_overrides;
    for (const char* key : {"model", "model2", "metric"}) {
        exp->add_option_function<std::string>(
            std::string("--") + key,
            [&overrides, key = std::string(key)](const std::string& v) { overrides[key] = v; },
            "override config '" + std::string(key) + "'");
    }
    for (const char* key : {"n", "k", "m", "reps"}) {
        exp->add_option_function<std::size_t>(
            std::string("--") + key,
            [&overrides, key = std::string(key)](std::size_t v) { overrides[key] = v; },
            "override config '" + std::string(key) + "'");
    }
    for (const char* key : {"t", "p", "alpha", "level", "lambda", "sigma-mult"}) {
        exp->add_option_function<double>(
            std::string("--") + key,
            [&overrides, key = std::string(key)](double v) {
                overrides[key == "sigma-mult" ? "sigma_mult" : key] = v;
            },
            "override config '" + std::string(key) + "'");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_model, sim_n, seed, out);
        if (est->parsed())
            return cmd_estimate(est_kind, est_input, est_k, est_alpha, est_level, est_scale,
                                est_kgrid, format, out);
        if (fun->parsed()) {
            auto opt = [&](const char* name, double v) {
                return fun->count(name) ? std::optional<double>(v) : std::nullopt;
            };
            return cmd_functional(fun_kind, fun_model, fun_p, fun_gamma, opt("--rho", fun_rho),
                                  fun_rhogrid, opt("--t", fun_t), fun_tgrid, opt("--x", fun_x),
                                  fun_xgrid, fun_n, fun_k, out);
        }
        if (exp->parsed()) {
            if (seed != evt::kDefaultSeed) overrides["seed"] = seed;
            if (threads != 0) overrides["threads"] = threads;
            return cmd_experiment(exp_name, exp_config, overrides, exp_list, exp_no_timing,
                                  exp_repcsv, out);
        }
    } catch (const evt::singularity_error& e) {
        std::cerr << "error (singularity): " << e.what() << "\n";
        return 4;
    } catch (const evt::quadrature_error& e) {
        std::cerr << "error (numeric): " << e.what() << "\n";
        return 4;
    } catch (const evt::data_error& e) {
        std::cerr << "error (data): " << e.what() << "\n";
        return 3;
    } catch (const evt::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const evt::capability_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
