#pragma once

#include <functional>

namespace fuplab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |last panel-doubling difference|
    int panels = 0;
};

/// Composite 16-point Gauss-Legendre on [a,b]; the panel count doubles until
/// successive values differ by less than tol (relative to 1 + |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-8);

/// Non-adaptive composite rule with a fixed panel count (for integrands
/// whose evaluations are themselves expensive quadratures).
double integrate_fixed(const std::function<double(double)>& f, double a,
                       double b, int panels);

/// Vector-valued variant sharing one panel refinement: f(t, out) fills n
/// components; the doubling stops when every component has settled.
QuadratureResult integrate_many(const std::function<void(double, double*)>& f,
                                int n, double a, double b, double* out,
                                double tol = 1e-8);

/// Integral over the real line via t = tan(theta). The integrand must decay
/// at least like |t|^-2 for the compactified integrand to stay bounded.
QuadratureResult integrate_real_line(const std::function<double(double)>& f,
                                     double tol = 1e-8);

/// Principal value over the real line for an integrand with an odd-type
/// singularity at t0: integrates the symmetrized f(t0+s) + f(t0-s) on s > 0.
QuadratureResult principal_value_real_line(const std::function<double(double)>& f,
                                           double t0, double tol = 1e-8);

}  // namespace fuplab
