#ifndef EVT_POT_HPP
#define EVT_POT_HPP

#include <cstdint>

#include "evt/models.hpp"
#include "evt/quadrature.hpp"
#include "evt/reports.hpp"
#include "evt/wasserstein.hpp"

namespace evt {

enum class ExceedanceMode { Relative, Shifted };

/// The k largest observations, renormalized: ratios to the threshold order
/// statistic (Relative) or shifted/scaled exceedances (Shifted).
struct ExceedanceSet {
    std::vector<double> values; // sorted ascending, k entries
    std::size_t k = 0;
    double threshold = 0.0; // X_{n-k,n} (or U(t) for conditional draws)
    ExceedanceMode mode = ExceedanceMode::Relative;
    double scale = 1.0; // 1 for Relative, f(threshold) for Shifted
};

ExceedanceSet exceedances(const Sample& s, std::size_t k, ExceedanceMode mode,
                          double scale = 1.0);

/// A_p(t): W_p distance (log metric) between the law of exceedance ratios
/// above U(t) and the limit Pareto law. p = inf is estimated by bracketed
/// maximization over a refining log-spaced grid (a lower bound; the
/// refinement level is reported in `subdivisions`).
QuadResult a_p_result(const TailModel& model, double t, double p,
                      const QuadratureSpec& quad = {});
double a_p(const TailModel& model, double t, double p, const QuadratureSpec& quad = {});

/// A_p'(t): W_p distance (Euclidean) between rescaled exceedances and the GP
/// law, using the model's GP-form scale a(t). Requires p < 1/gamma_+.
QuadResult a_p_prime_result(const TailModel& model, double t, double p,
                            const QuadratureSpec& quad = {});
double a_p_prime(const TailModel& model, double t, double p, const QuadratureSpec& quad = {});

/// Psi_{gamma,rho}(x) = int_1^x s^(gamma-1) int_1^s u^(rho-1) du ds, in
/// closed form with all degenerate branches; defined for x > 0 (the same
/// closed form continues the defining integral below 1).
double psi(double gamma, double rho, double x);

/// c_p(rho) = lim A_p(t)/A(t): closed forms for p in {1,2}, quadrature
/// otherwise; p = inf gives 1/|rho| (rho < 0) or +inf (rho = 0).
double c_p(double rho, double p, const QuadratureSpec& quad = {});
/// Quadrature-only evaluation (independent code path, used for cross-checks).
QuadResult c_p_quadrature_result(double rho, double p, const QuadratureSpec& quad = {});
double c_p_quadrature(double rho, double p, const QuadratureSpec& quad = {});

/// c_p'(gamma, rho) = (int_1^inf Psi^p x^-2 dx)^(1/p); needs (gamma+rho)p < 1.
QuadResult c_p_prime_result(double gamma, double rho, double p,
                            const QuadratureSpec& quad = {});
double c_p_prime(double gamma, double rho, double p, const QuadratureSpec& quad = {});

/// Hill estimator from the k top order statistics.
EstimateReport hill(const Sample& s, std::size_t k);

/// Weissman extreme quantile estimate with the asymptotic CI at `level`.
EstimateReport weissman(const Sample& s, std::size_t k, double alpha, double level = 0.95);

/// Probability-weighted-moment estimates (gamma, sigma) of the GP model from
/// shifted exceedances normalized by `scale`. Value is gamma-hat; extras
/// carry M0, M1 and sigma-hat.
EstimateReport pwm_gp(const Sample& s, std::size_t k, double scale);

/// Hill bias constant b(rho) = int_1^inf (z^rho - 1)/rho z^-2 dz = 1/(1-rho).
double bias_b(double rho);

/// Atoms X*(1 + A_t ((X*)^(rho/gamma) - 1)/rho) with X* i.i.d. Pareto(1/gamma):
/// the biased limit measure of the bias regime.
EmpiricalMeasure biased_limit_sample(double gamma, double rho, double A_t, std::size_t k,
                                     std::uint64_t seed, std::uint64_t stream_index = 0);

/// Simulates the conditional law of the exceedance measure given
/// Z_{n-k,n} = t directly: k i.i.d. unit-Pareto draws Z~ mapped through
/// U(t Z~)/U(t) (Relative) or (U(t Z~) - U(t))/a(t) (Shifted).
ExceedanceSet conditional_exceedance_sample(const TailModel& model, double t, std::size_t k,
                                            std::uint64_t seed, ExceedanceMode mode,
                                            std::uint64_t stream_index = 0);

/// int_1^inf A_p(t) beta_{n-k,k+1}(1 - 1/t) t^-2 dt: the unconditional
/// bound on the distance between the exceedance measure and the Pareto one.
QuadResult beta_mixture_bound_result(const TailModel& model, std::size_t n, std::size_t k,
                                     double p, const QuadratureSpec& quad = {});
double beta_mixture_bound(const TailModel& model, std::size_t n, std::size_t k, double p,
                          const QuadratureSpec& quad = {});

} // namespace evt

#endif
