#include "evt/pot.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "evt/errors.hpp"
#include "evt/mc.hpp"
#include "evt/rng.hpp"
#include "evt/special.hpp"

namespace evt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sample(const Sample& s, const char* who) {
    if (s.values.empty()) throw domain_error(std::string(who) + ": empty sample");
    if (!std::is_sorted(s.values.begin(), s.values.end()))
        throw data_error(std::string(who) + ": sample values must be sorted ascending");
}

void check_k(std::size_t k, std::size_t n, const char* who) {
    if (k < 1 || k >= n)
        throw domain_error(std::string(who) + ": k must satisfy 1 <= k <= n-1 (k=" +
                           std::to_string(k) + ", n=" + std::to_string(n) + ")");
}

// |log U(zt) - log U(t) - gamma log z|, the A_p integrand.
double log_deviation(const TailModel& model, double log_u_t, double t, double z) {
    return std::fabs(model.log_tail_quantile(z * t) - log_u_t - model.gamma() * std::log(z));
}

// Bracketed maximization of f over log-spaced z in (1, zmax]: coarse grid,
// then golden-section refinement around the best bracket.
QuadResult grid_sup(const std::function<double(double)>& f, double zmax, int grid_points,
                    int refinements) {
    double best = 0.0, best_lz = 0.0;
    const double lmax = std::log(zmax);
    for (int i = 1; i <= grid_points; ++i) {
        const double lz = lmax * i / grid_points;
        const double v = f(std::exp(lz));
        if (v > best) {
            best = v;
            best_lz = lz;
        }
    }
    double lo = std::max(0.0, best_lz - lmax / grid_points);
    double hi = std::min(lmax, best_lz + lmax / grid_points);
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int i = 0; i < refinements; ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(std::exp(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(std::exp(x1));
        }
        best = std::max(best, std::max(f1, f2));
    }
    QuadResult r;
    r.value = best;
    r.error = std::fabs(f2 - f1);
    r.subdivisions = refinements;
    r.converged = true;
    return r;
}

} // namespace

ExceedanceSet exceedances(const Sample& s, std::size_t k, ExceedanceMode mode, double scale) {
    check_sample(s, "exceedances");
    const std::size_t n = s.values.size();
    check_k(k, n, "exceedances");
    const double threshold = s.values[n - 1 - k];
    ExceedanceSet e;
    e.k = k;
    e.threshold = threshold;
    e.mode = mode;
    e.values.resize(k);
    if (mode == ExceedanceMode::Relative) {
        if (!(threshold > 0.0))
            throw data_error("exceedances: Relative mode requires a positive threshold");
        e.scale = 1.0;
        for (std::size_t i = 0; i < k; ++i) e.values[i] = s.values[n - k + i] / threshold;
    } else {
        if (!(scale > 0.0)) throw domain_error("exceedances: Shifted mode requires scale > 0");
        e.scale = scale;
        for (std::size_t i = 0; i < k; ++i)
            e.values[i] = (s.values[n - k + i] - threshold) / scale;
    }
    return e;
}

QuadResult a_p_result(const TailModel& model, double t, double p, const QuadratureSpec& quad) {
    if (!(model.gamma() > 0.0))
        throw capability_error("a_p: requires gamma > 0 (use a_p_prime)");
    if (!(t > 1.0)) throw domain_error("a_p: t must be > 1");
    if (!(model.tail_quantile(t) > 0.0)) throw domain_error("a_p: U(t) must be positive");
    const double log_u_t = model.log_tail_quantile(t);
    if (std::isinf(p)) {
        return grid_sup([&](double z) { return log_deviation(model, log_u_t, t, z); }, 1e12,
                        512, 100);
    }
    if (!(p >= 1.0)) throw domain_error("a_p: p must be >= 1");
    QuadResult r = integrate_tail_z2(
        [&](double z) { return std::pow(log_deviation(model, log_u_t, t, z), p); }, quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double a_p(const TailModel& model, double t, double p, const QuadratureSpec& quad) {
    return a_p_result(model, t, p, quad).value;
}

QuadResult a_p_prime_result(const TailModel& model, double t, double p,
                            const QuadratureSpec& quad) {
    if (!(t > 1.0)) throw domain_error("a_p_prime: t must be > 1");
    const double gamma = model.gamma();
    const double gamma_plus = std::max(gamma, 0.0);
    if (!(p >= 1.0) || std::isinf(p)) throw domain_error("a_p_prime: p must be finite and >= 1");
    if (gamma_plus > 0.0 && !(p < 1.0 / gamma_plus))
        throw domain_error("a_p_prime: integrability requires p < 1/gamma_+");
    const double a_t = model.gp_scale(t); // capability_error if unavailable
    const double u_t = model.tail_quantile(t);
    QuadResult r = integrate_tail_z2(
        [&](double z) {
            const double dev =
                (model.tail_quantile(z * t) - u_t) / a_t - powm1_over(gamma, z);
            return std::pow(std::fabs(dev), p);
        },
        quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double a_p_prime(const TailModel& model, double t, double p, const QuadratureSpec& quad) {
    return a_p_prime_result(model, t, p, quad).value;
}

double psi(double gamma, double rho, double x) {
    if (!(x > 0.0)) throw domain_error("psi: x must be > 0");
    if (!(rho <= 0.0)) throw domain_error("psi: rho must be <= 0");
    const double L = std::log(x);
    // D(h) = (x^h - 1)/h and its h-derivatives; series near h = 0.
    auto D1 = [L, x](double h) {
        if (std::fabs(h) < 1e-4)
            return L * L / 2.0 + h * L * L * L / 3.0 + h * h * L * L * L * L / 8.0;
        const double xh = std::pow(x, h);
        return (h * L * xh - xh + 1.0) / (h * h);
    };
    auto D2 = [L, x](double h) {
        if (std::fabs(h) < 1e-3)
            return L * L * L / 3.0 + h * L * L * L * L / 4.0 + h * h * std::pow(L, 5) / 10.0;
        const double xh = std::pow(x, h);
        return (h * h * L * L * xh - 2.0 * h * L * xh + 2.0 * xh - 2.0) / (h * h * h);
    };
    if (rho == 0.0) return D1(gamma);
    if (std::fabs(rho) < 1e-5) return D1(gamma) + 0.5 * rho * D2(gamma);
    return (powm1_over(gamma + rho, x) - powm1_over(gamma, x)) / rho;
}

QuadResult c_p_quadrature_result(double rho, double p, const QuadratureSpec& quad) {
    if (!(rho <= 0.0)) throw domain_error("c_p: rho must be <= 0");
    if (!(p >= 1.0) || std::isinf(p))
        throw domain_error("c_p_quadrature: p must be finite and >= 1");
    QuadResult r = integrate_tail_z2(
        [rho, p](double z) { return std::pow(powm1_over(rho, z), p); }, quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double c_p_quadrature(double rho, double p, const QuadratureSpec& quad) {
    return c_p_quadrature_result(rho, p, quad).value;
}

double c_p(double rho, double p, const QuadratureSpec& quad) {
    if (!(rho <= 0.0)) throw domain_error("c_p: rho must be <= 0");
    if (std::isinf(p)) {
        // sup form: 1/|rho| for rho < 0, +inf at rho = 0 (a sentinel, not an error)
        return rho < 0.0 ? 1.0 / (-rho) : kInf;
    }
    if (!(p >= 1.0)) throw domain_error("c_p: p must be >= 1");
    if (p == 1.0) return 1.0 / (1.0 - rho);
    if (p == 2.0) return std::sqrt(2.0 / ((1.0 - 2.0 * rho) * (1.0 - rho)));
    return c_p_quadrature(rho, p, quad);
}

QuadResult c_p_prime_result(double gamma, double rho, double p, const QuadratureSpec& quad) {
    if (!(rho <= 0.0)) throw domain_error("c_p_prime: rho must be <= 0");
    if (!(p >= 1.0) || std::isinf(p))
        throw domain_error("c_p_prime: p must be finite and >= 1");
    if (!((gamma + rho) * p < 1.0))
        throw domain_error("c_p_prime: integrability requires (gamma+rho)p < 1");
    QuadResult r = integrate_tail_z2(
        [gamma, rho, p](double x) { return std::pow(psi(gamma, rho, x), p); }, quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double c_p_prime(double gamma, double rho, double p, const QuadratureSpec& quad) {
    return c_p_prime_result(gamma, rho, p, quad).value;
}

EstimateReport hill(const Sample& s, std::size_t k) {
    check_sample(s, "hill");
    const std::size_t n = s.values.size();
    check_k(k, n, "hill");
    const double threshold = s.values[n - 1 - k];
    if (!(threshold > 0.0)) throw data_error("hill: threshold order statistic must be positive");
    std::vector<double> logs(k);
    for (std::size_t i = 0; i < k; ++i) logs[i] = std::log(s.values[n - k + i] / threshold);
    EstimateReport r;
    r.estimator = "hill";
    r.k = k;
    r.value = compensated_sum(logs) / static_cast<double>(k);
    r.extras = {{"k", static_cast<double>(k)},
                {"n", static_cast<double>(n)},
                {"threshold", threshold}};
    return r;
}

EstimateReport weissman(const Sample& s, std::size_t k, double alpha, double level) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("weissman: alpha must be in (0,1)");
    if (!(level > 0.0 && level < 1.0)) throw domain_error("weissman: level must be in (0,1)");
    const EstimateReport h = hill(s, k);
    const std::size_t n = s.values.size();
    const double threshold = s.values[n - 1 - k];
    const double gamma_hat = h.value;
    const double ratio = static_cast<double>(k) / (static_cast<double>(n) * alpha);
    const double q_hat = threshold * std::pow(ratio, gamma_hat);
    const double v_n = std::log(ratio) / std::sqrt(static_cast<double>(k));
    const double z = normal_quantile(0.5 + level / 2.0);

    EstimateReport r;
    r.estimator = "weissman";
    r.k = k;
    r.value = q_hat;
    // v_n < 0 (no extrapolation) or gamma_hat < 0 would swap the endpoints
    const double half = std::fabs(z * gamma_hat * v_n);
    r.ci = EstimateReport::Ci{q_hat * std::exp(-half), q_hat * std::exp(half), level};
    r.extras = {{"k", static_cast<double>(k)},
                {"n", static_cast<double>(n)},
                {"threshold", threshold},
                {"gamma_hat", gamma_hat},
                {"alpha", alpha},
                {"v_n", v_n}};
    if (!(alpha < static_cast<double>(k) / static_cast<double>(n)))
        r.extras.emplace_back("warn_no_extrapolation", 1.0);
    return r;
}

EstimateReport pwm_gp(const Sample& s, std::size_t k, double scale) {
    if (k < 2) throw domain_error("pwm_gp: k must be >= 2");
    if (!(scale > 0.0)) throw domain_error("pwm_gp: scale must be > 0");
    const ExceedanceSet e = exceedances(s, k, ExceedanceMode::Shifted, scale);
    // ascending order statistic j carries weight (1 - j/k)^s, the empirical
    // counterpart of E[H (1 - F(H))^s]
    const double kd = static_cast<double>(k);
    std::vector<double> t0(k), t1(k);
    for (std::size_t j = 1; j <= k; ++j) {
        const double w = 1.0 - static_cast<double>(j) / kd;
        t0[j - 1] = e.values[j - 1];
        t1[j - 1] = w * e.values[j - 1];
    }
    const double m0 = compensated_sum(t0) / kd;
    const double m1 = compensated_sum(t1) / kd;
    const double denom = m0 - 2.0 * m1;
    if (std::fabs(denom) <= 1e-14 * std::fabs(m0))
        throw singularity_error("pwm_gp: g-map denominator M0 - 2*M1 vanishes (x = 2y surface)");
    const double gamma_hat = 2.0 - m0 / denom;
    const double sigma_hat = 2.0 * m0 * m1 / denom;

    EstimateReport r;
    r.estimator = "pwm";
    r.k = k;
    r.value = gamma_hat;
    r.extras = {{"k", static_cast<double>(k)}, {"n", static_cast<double>(s.values.size())},
                {"threshold", e.threshold},    {"scale", scale},
                {"M0", m0},                    {"M1", m1},
                {"sigma_hat", sigma_hat}};
    return r;
}

double bias_b(double rho) {
    if (!(rho <= 0.0)) throw domain_error("bias_b: rho must be <= 0");
    return 1.0 / (1.0 - rho);
}

EmpiricalMeasure biased_limit_sample(double gamma, double rho, double A_t, std::size_t k,
                                     std::uint64_t seed, std::uint64_t stream_index) {
    if (!(gamma > 0.0)) throw domain_error("biased_limit_sample: gamma must be > 0");
    if (!(rho <= 0.0)) throw domain_error("biased_limit_sample: rho must be <= 0");
    if (k == 0) throw domain_error("biased_limit_sample: k must be >= 1");
    if (rho == 0.0) {
        if (A_t != 0.0)
            throw domain_error(
                "biased_limit_sample: rho = 0 makes the multiplier unbounded; A_t = " +
                std::to_string(A_t) + " violates positivity");
    } else if (!(std::fabs(A_t) / (-rho) < 1.0)) {
        throw domain_error("biased_limit_sample: positivity requires |A_t|/|rho| < 1 (A_t = " +
                           std::to_string(A_t) + ")");
    }
    Rng rng = Rng::stream(seed, stream_index);
    std::vector<double> atoms(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double x = std::pow(rng.unit_pareto(), gamma); // Pareto(1/gamma)
        const double bend = rho == 0.0 ? 0.0 : A_t * powm1_over(rho, std::pow(x, 1.0 / gamma));
        atoms[i] = x * (1.0 + bend);
    }
    return EmpiricalMeasure::uniform(std::move(atoms));
}

ExceedanceSet conditional_exceedance_sample(const TailModel& model, double t, std::size_t k,
                                            std::uint64_t seed, ExceedanceMode mode,
                                            std::uint64_t stream_index) {
    if (!(t > 1.0)) throw domain_error("conditional_exceedance_sample: t must be > 1");
    if (k == 0) throw domain_error("conditional_exceedance_sample: k must be >= 1");
    const double u_t = model.tail_quantile(t);
    double scale = 1.0;
    if (mode == ExceedanceMode::Relative) {
        if (!(u_t > 0.0))
            throw domain_error("conditional_exceedance_sample: Relative mode needs U(t) > 0");
    } else {
        scale = model.gp_scale(t);
    }
    Rng rng = Rng::stream(seed, stream_index);
    ExceedanceSet e;
    e.k = k;
    e.threshold = u_t;
    e.mode = mode;
    e.scale = scale;
    e.values.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double uz = model.tail_quantile(t * rng.unit_pareto());
        e.values[i] = mode == ExceedanceMode::Relative ? uz / u_t : (uz - u_t) / scale;
    }
    std::sort(e.values.begin(), e.values.end());
    return e;
}

QuadResult beta_mixture_bound_result(const TailModel& model, std::size_t n, std::size_t k,
                                     double p, const QuadratureSpec& quad) {
    check_k(k, n, "beta_mixture_bound");
    if (!model.has_finite_left_endpoint() || !(model.left_endpoint() > 0.0))
        throw domain_error(
            "beta_mixture_bound: support must be positive and bounded away from 0 "
            "(wrap the model with a positive shift)");

    const double a = static_cast<double>(n - k);
    const double b = static_cast<double>(k + 1);
    QuadratureSpec inner = quad;
    inner.abs_tol = std::max(quad.abs_tol, 1e-12);
    inner.rel_tol = std::max(quad.rel_tol, 1e-9);

    std::unordered_map<double, double> cache;
    auto a_p_cached = [&](double t) {
        auto it = cache.find(t);
        if (it != cache.end()) return it->second;
        const double v = a_p(model, t, p, inner);
        cache.emplace(t, v);
        return v;
    };
    auto integrand = [&](double u) {
        const double t = 1.0 / (1.0 - u);
        return t > 1.0 ? a_p_cached(t) * beta_pdf(u, a, b) : 0.0;
    };

    // Split at the Beta mass concentration so the adaptive pass cannot miss
    // the (very narrow for large n) peak.
    const double mean = a / (a + b);
    const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
    std::vector<double> cuts{0.0, 1.0};
    for (double j : {-8.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 8.0}) {
        const double c = mean + j * sd;
        if (c > 0.0 && c < 1.0) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    QuadratureSpec outer = quad;
    outer.abs_tol = quad.abs_tol / static_cast<double>(cuts.size());
    QuadResult out;
    out.converged = true;
    std::vector<double> vals, errs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const QuadResult r = integrate(integrand, cuts[i], cuts[i + 1], outer);
        vals.push_back(r.value);
        errs.push_back(r.error);
        out.subdivisions += r.subdivisions;
    }
    out.value = compensated_sum(vals);
    out.error = compensated_sum(errs);
    return out;
}

double beta_mixture_bound(const TailModel& model, std::size_t n, std::size_t k, double p,
                          const QuadratureSpec& quad) {
    return beta_mixture_bound_result(model, n, k, p, quad).value;
}

} // namespace evt
