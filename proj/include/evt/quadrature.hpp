#ifndef EVT_QUADRATURE_HPP
#define EVT_QUADRATURE_HPP

#include <functional>

namespace evt {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdiv = 2000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    int subdivisions = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod 7/15 on a finite interval. Throws
// quadrature_error (carrying the partial value) if the subdivision budget is
// exhausted before the tolerance is met.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureSpec& spec = {});

// Integrals against the tail weights that appear throughout the library:
//   integrate_tail_z2:   int_1^inf g(z) z^-2 dz
//   integrate_bm_weight: int_0^inf g(z) e^{-1/z} z^-2 dz
// Both are summed over unit blocks of log z with a geometric estimate of the
// remaining tail folded into the reported error; integrands may be regularly
// varying with index below 1.
QuadResult integrate_tail_z2(const std::function<double(double)>& g,
                             const QuadratureSpec& spec = {});
QuadResult integrate_bm_weight(const std::function<double(double)>& g,
                               const QuadratureSpec& spec = {});

} // namespace evt

#endif
