#pragma once

#include <numbers>

#include "nbl/geometry.hpp"

namespace nbl {

// Product bound attained by the square: (4 s)^2 * (pi/s)^2 = 16 pi^2.
inline constexpr double kProductLimit =
    16.0 * std::numbers::pi * std::numbers::pi;

// Upper bounds for the first two nonzero Neumann eigenvalues of a
// parallelogram.  The lam pair comes from cosine trial functions, the eta
// pair from affine ones; both are eigenvalues of explicit 2x2 matrices.
struct ParallelogramBounds {
  double lam_minus = 0.0, lam_plus = 0.0;
  double eta_minus = 0.0, eta_plus = 0.0;
  double mu2_bound = 0.0;  // min(lam_minus, eta_minus) >= mu_2
  double mu3_bound = 0.0;  // lam_plus >= mu_3
  double mean = 0.0;       // (lam_minus + lam_plus) / 2
  bool mu2_tight = false;  // equality holds iff rectangle
  bool mu3_tight = false;  // equality holds iff rectangle with l2 <= 2 l1
};

ParallelogramBounds parallelogram_bounds(const Parallelogram& p);

// Equal-side specialization; closed forms split into one-term factors.
struct RhombusBounds {
  double lam_minus = 0.0, lam_plus = 0.0;
  double eta_minus = 0.0, eta_plus = 0.0;
};

RhombusBounds rhombus_bounds(double side, double phi);

// Upper bounds for a constant-width strip.  Throws NotConstantWidth when
// the width varies.  i1 and i2 are the slope integrals
//   i1 = integral_0^l (1 + g'(x)^2) dx,
//   i2 = integral_0^l g'(x) sin(pi x / l) dx.
struct StripBounds {
  double length = 0.0, width = 0.0;
  double i1 = 0.0, i2 = 0.0;
  double lam_minus = 0.0, lam_plus = 0.0;
  double mu2_simple = 0.0;  // min(pi^2/l^2, pi^2 i1 / (d^2 l))
  double mu2_bound = 0.0;   // lam_minus
  double mu3_bound = 0.0;   // lam_plus
  double mean = 0.0;
};

StripBounds strip_bounds(const StripDomain& d);

// Exact lowest nonzero eigenvalues of a rectangle, for equality audits.
double rectangle_mu2(double l1, double l2);
double rectangle_mu3(double l1, double l2);

// Shape class of constant-width strips with d/l <= rho and
// |g'| <= max_slope, tuned so that the perimeter product stays below the
// square's value.
struct NonconvexClassBound {
  double rho = 0.0;
  double max_slope = 0.0;      // sqrt((2 - rho)^2 - 1)
  double product_bound = 0.0;  // 16 pi^2
};

NonconvexClassBound nonconvex_class_bound(double rho);

// Chain of estimates for one strip:
//   L^2 mu_2 <= v0 = L^2 pi^2 / l^2
//            <= v1 = 4 pi^2 (d/l + sqrt(1 + sup|g'|^2))^2
//            <= v2 = 4 pi^2 (rho + sqrt(1 + max_slope^2))^2 = 16 pi^2.
// v2 applies only when the strip is a member of the class.
struct NonconvexChain {
  double v0 = 0.0, v1 = 0.0, v2 = 0.0;
  bool member = false;
};

NonconvexChain nonconvex_chain(const StripDomain& d, double rho);

}  // namespace nbl
