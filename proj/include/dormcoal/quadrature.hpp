#ifndef DORMCOAL_QUADRATURE_HPP
#define DORMCOAL_QUADRATURE_HPP

#include <functional>

namespace dormcoal {

// Adaptive Gauss-Kronrod (G7, K15) on [a, b] to absolute tolerance abs_tol.
// Bisects intervals whose K15-G7 discrepancy exceeds their share of the budget;
// endpoint singularities converge through geometric refinement.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 100);

// I(p, q, alpha) = \int_0^inf u^p (1+u)^{-q} e^{-alpha u} du for q >= p >= 0,
// alpha > 0. Truncated at U with the analytic tail bound U^{p-q} e^{-alpha U}/alpha,
// then integrated adaptively. This one integrand family covers the merger-rate
// integrals (after u = y/(1-y)), the Y_kappa moments, and the M_N correction
// integral.
double integral_power_ratio_exp(double p, double q, double alpha, double abs_tol = 1e-10);

}  // namespace dormcoal

#endif
