#pragma once

#include <functional>
#include <vector>

namespace nbl::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes via Newton iteration on the Legendre polynomial; cached per order.
// Exact for polynomials of degree <= 2*order - 1.
const Rule& gauss_legendre(int order);

// Composite Gauss-Legendre over [a, b] split into equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int order, int panels = 1);

// Adaptive Gauss-Kronrod (7, 15) bisection.  Stops when the per-interval
// error estimates sum below max(abs_tol, rel_tol * |integral|).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double abs_tol = 0.0);

}  // namespace nbl::quad
