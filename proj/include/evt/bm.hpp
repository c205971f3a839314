#ifndef EVT_BM_HPP
#define EVT_BM_HPP

#include <vector>

#include "evt/models.hpp"
#include "evt/quadrature.hpp"

namespace evt {

struct BlockMaximaSet {
    std::vector<double> values; // k = floor(n/m) normalized maxima, sorted
    std::size_t m = 1;          // block size
    double a_m = 1.0;           // scale
    double b_m = 0.0;           // location
};

/// Maxima of disjoint blocks of the raw (unsorted) observation sequence,
/// normalized as (max - b_m)/a_m; the trailing partial block is dropped.
BlockMaximaSet block_maxima(const std::vector<double>& raw, std::size_t m, double a_m,
                            double b_m);

/// A_p''(t): W_p distance between the law of a normalized block maximum of
/// size t and the GEV law, via the V-transform integral with weight
/// e^{-1/z} z^{-2}. Requires gamma < 1 and p < 1/gamma_+, and a model with a
/// registered BM scale.
QuadResult a_p_doubleprime_result(const TailModel& model, double t, double p,
                                  const QuadratureSpec& quad = {});
double a_p_doubleprime(const TailModel& model, double t, double p,
                       const QuadratureSpec& quad = {});

/// c_p''(gamma, rho) = (int_0^inf Psi^p e^{-1/z} z^-2 dz)^(1/p).
QuadResult c_p_doubleprime_result(double gamma, double rho, double p,
                                  const QuadratureSpec& quad = {});
double c_p_doubleprime(double gamma, double rho, double p, const QuadratureSpec& quad = {});

/// Exact W_p between the law of (M_1 - b_m)/a_m (block size m, a_m = a(m),
/// b_m = V(m)) and the GEV law: equals A_p''(m).
double bm_distance_to_gev(const TailModel& model, std::size_t m, double p,
                          const QuadratureSpec& quad = {});

} // namespace evt

#endif
