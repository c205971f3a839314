#include "evt/bm.hpp"

#include <algorithm>
#include <cmath>

#include "evt/errors.hpp"
#include "evt/pot.hpp"
#include "evt/special.hpp"

namespace evt {

BlockMaximaSet block_maxima(const std::vector<double>& raw, std::size_t m, double a_m,
                            double b_m) {
    if (m < 1) throw domain_error("block_maxima: m must be >= 1");
    if (raw.size() < m) throw domain_error("block_maxima: need at least one full block");
    if (!(a_m > 0.0)) throw domain_error("block_maxima: a_m must be > 0");
    const std::size_t k = raw.size() / m;
    BlockMaximaSet out;
    out.m = m;
    out.a_m = a_m;
    out.b_m = b_m;
    out.values.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        double mx = raw[i * m];
        for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, raw[i * m + j]);
        out.values[i] = (mx - b_m) / a_m;
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

namespace {

void check_bm_exponents(double gamma, double p, const char* who) {
    if (!(p >= 1.0) || std::isinf(p))
        throw domain_error(std::string(who) + ": p must be finite and >= 1");
    if (!(gamma < 1.0)) throw domain_error(std::string(who) + ": requires gamma < 1");
    const double gamma_plus = std::max(gamma, 0.0);
    if (gamma_plus > 0.0 && !(p < 1.0 / gamma_plus))
        throw domain_error(std::string(who) + ": integrability requires p < 1/gamma_+");
}

} // namespace

QuadResult a_p_doubleprime_result(const TailModel& model, double t, double p,
                                  const QuadratureSpec& quad) {
    if (!(t > 0.0)) throw domain_error("a_p_doubleprime: t must be > 0");
    check_bm_exponents(model.gamma(), p, "a_p_doubleprime");
    const double gamma = model.gamma();
    const double a_t = model.bm_scale(t); // capability_error if missing
    const double v_t = model.bm_quantile(t);
    QuadResult r = integrate_bm_weight(
        [&](double z) {
            const double dev = (model.bm_quantile(z * t) - v_t) / a_t - powm1_over(gamma, z);
            return std::pow(std::fabs(dev), p);
        },
        quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double a_p_doubleprime(const TailModel& model, double t, double p, const QuadratureSpec& quad) {
    return a_p_doubleprime_result(model, t, p, quad).value;
}

QuadResult c_p_doubleprime_result(double gamma, double rho, double p,
                                  const QuadratureSpec& quad) {
    check_bm_exponents(gamma, p, "c_p_doubleprime");
    if (!(rho <= 0.0)) throw domain_error("c_p_doubleprime: rho must be <= 0");
    QuadResult r = integrate_bm_weight(
        [gamma, rho, p](double z) { return std::pow(psi(gamma, rho, z), p); }, quad);
    r.value = std::pow(r.value, 1.0 / p);
    return r;
}

double c_p_doubleprime(double gamma, double rho, double p, const QuadratureSpec& quad) {
    return c_p_doubleprime_result(gamma, rho, p, quad).value;
}

double bm_distance_to_gev(const TailModel& model, std::size_t m, double p,
                          const QuadratureSpec& quad) {
    if (m < 1) throw domain_error("bm_distance_to_gev: m must be >= 1");
    return a_p_doubleprime(model, static_cast<double>(m), p, quad);
}

} // namespace evt
