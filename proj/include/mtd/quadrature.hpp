#pragma once

#include <functional>
#include <vector>

namespace mtd::quad {

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n (Newton iteration on Legendre polynomials);
/// results are cached per n.
const GaussLegendre& gauss_legendre(int n);

/// Fixed n-point Gauss-Legendre approximation of an integral on [a, b].
double gauss_legendre_integrate(const std::function<double(double)>& f, double a,
                                double b, int n);

/// Adaptive Gauss-Kronrod on [a, b]. Throws NumericError if neither the
/// relative target nor the absolute floor abs_tol can be certified.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-9, double abs_tol = 1e-12);

/// tanh-sinh on [a, b]; tolerant of integrable endpoint singularities.
/// Convergence is accepted when the level-to-level delta falls below either
/// the relative target (vs the L1 norm) or abs_tol.
double integrate_finite_singular(const std::function<double(double)>& f, double a,
                                 double b, double rel_tol = 1e-10,
                                 double abs_tol = 1e-12);

/// Adaptive quadrature on [0, inf), robust to both exponential and polynomial
/// tails (maps through x = t/(1-t)).
double integrate_halfline(const std::function<double(double)>& f,
                          double rel_tol = 1e-9);

}  // namespace mtd::quad
