#include "nbl/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "nbl/quadrature.hpp"

namespace nbl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
// Past this root-to-sum ratio the subtracted form loses too many digits,
// so the minus branch switches to the conjugate quotient.
constexpr double kConjugateSwitch = 0.999;

// Tolerance for the structural equality flags.
constexpr double kShapeTol = 1e-12;

}  // namespace

ParallelogramBounds parallelogram_bounds(const Parallelogram& p) {
  double l1 = p.l1(), l2 = p.l2();
  double a1 = l1 * l1, a2 = l2 * l2;
  double s = a1 + a2;
  double diff = a2 - a1;
  double c = std::cos(p.phi());
  double c2 = c * c;
  double area = p.area();
  double area2 = area * area;

  ParallelogramBounds b;

  double cross_lam = (256.0 / (kPi2 * kPi2)) * a1 * a2 * c2;
  double root_lam = std::sqrt(diff * diff + cross_lam);
  b.lam_plus = kPi2 * (s + root_lam) / (2.0 * area2);
  if (root_lam > kConjugateSwitch * s) {
    double conj = 4.0 * a1 * a2 * (1.0 - (64.0 / (kPi2 * kPi2)) * c2);
    b.lam_minus = kPi2 * conj / (2.0 * area2 * (s + root_lam));
  } else {
    b.lam_minus = kPi2 * (s - root_lam) / (2.0 * area2);
  }

  double cross_eta = 4.0 * a1 * a2 * c2;
  double root_eta = std::sqrt(diff * diff + cross_eta);
  b.eta_plus = 6.0 * (s + root_eta) / area2;
  // s^2 - root_eta^2 = 4 a1 a2 sin^2(phi) = 4 area^2, so the conjugate
  // form is exact and cheap; use it unconditionally.
  b.eta_minus = 24.0 / (s + root_eta);

  b.mu2_bound = std::min(b.lam_minus, b.eta_minus);
  b.mu3_bound = b.lam_plus;
  b.mean = kPi2 * s / (2.0 * area2);

  bool rect = std::abs(c) <= kShapeTol;
  b.mu2_tight = rect;
  b.mu3_tight = rect && l2 <= 2.0 * l1 * (1.0 + kShapeTol);
  return b;
}

RhombusBounds rhombus_bounds(double side, double phi) {
  Parallelogram p(side, side, phi);  // validates inputs
  double ac = std::abs(std::cos(phi));
  double area2 = p.area() * p.area();
  double a = side * side;
  RhombusBounds b;
  b.lam_minus = kPi2 * a * (1.0 - (8.0 / kPi2) * ac) / area2;
  b.lam_plus = kPi2 * a * (1.0 + (8.0 / kPi2) * ac) / area2;
  b.eta_minus = 12.0 * a * (1.0 - ac) / area2;
  b.eta_plus = 12.0 * a * (1.0 + ac) / area2;
  return b;
}

StripBounds strip_bounds(const StripDomain& d) {
  if (!d.constant_width()) {
    throw NotConstantWidth("strip bounds require a constant-width strip");
  }
  double l = d.length();
  double w = 0.5 * (d.min_width() + d.max_width());

  const Profile& g = d.lower();
  auto i1_f = [&g](double x) {
    double s = g.derivative(x);
    return 1.0 + s * s;
  };
  auto i2_f = [&g, l](double x) {
    return g.derivative(x) * std::sin(kPi * x / l);
  };
  double i1, i2;
  if (g.spec.has_value()) {
    // Integrands live in the trig class of frequency <= 2 k + 1, and this
    // order makes the rule exact to machine precision on that class.
    int order = 8 * (1 + d.max_frequency());
    i1 = quad::integrate(i1_f, 0.0, l, order);
    i2 = quad::integrate(i2_f, 0.0, l, order);
  } else {
    i1 = quad::integrate_adaptive(i1_f, 0.0, l, 1e-12, 1e-14);
    i2 = quad::integrate_adaptive(i2_f, 0.0, l, 1e-12, 1e-14);
  }

  StripBounds b;
  b.length = l;
  b.width = w;
  b.i1 = i1;
  b.i2 = i2;

  double p = w / l;
  double q = i1 / w;
  double cross = (64.0 / (kPi2 * l * l)) * i2 * i2;
  double root = std::sqrt((p - q) * (p - q) + cross);
  double scale = kPi2 / (2.0 * l * w);
  b.lam_plus = scale * (p + q + root);
  if (root > kConjugateSwitch * (p + q)) {
    double conj = 4.0 * i1 / l - cross;
    b.lam_minus = scale * conj / (p + q + root);
  } else {
    b.lam_minus = scale * (p + q - root);
  }
  b.mu2_simple = std::min(kPi2 / (l * l), kPi2 * i1 / (w * w * l));
  b.mu2_bound = b.lam_minus;
  b.mu3_bound = b.lam_plus;
  b.mean = 0.5 * kPi2 * (1.0 / (l * l) + i1 / (l * w * w));
  return b;
}

double rectangle_mu2(double l1, double l2) {
  if (l1 > l2) std::swap(l1, l2);
  return kPi2 / (l2 * l2);
}

double rectangle_mu3(double l1, double l2) {
  if (l1 > l2) std::swap(l1, l2);
  return std::min(kPi2 / (l1 * l1), 4.0 * kPi2 / (l2 * l2));
}

NonconvexClassBound nonconvex_class_bound(double rho) {
  if (!(rho > 0.0) || rho > 1.0) {
    throw DegenerateDomain("class parameter rho must lie in (0, 1]");
  }
  NonconvexClassBound b;
  b.rho = rho;
  b.max_slope = std::sqrt((2.0 - rho) * (2.0 - rho) - 1.0);
  b.product_bound = kProductLimit;
  return b;
}

NonconvexChain nonconvex_chain(const StripDomain& d, double rho) {
  NonconvexClassBound cls = nonconvex_class_bound(rho);
  double l = d.length();
  double w = d.max_width();
  double slope = d.sup_lower_slope();
  NonconvexChain chain;
  double per = d.perimeter();
  chain.v0 = per * per * kPi2 / (l * l);
  double r1 = w / l + std::sqrt(1.0 + slope * slope);
  chain.v1 = 4.0 * kPi2 * r1 * r1;
  double r2 = rho + std::sqrt(1.0 + cls.max_slope * cls.max_slope);
  chain.v2 = 4.0 * kPi2 * r2 * r2;  // = 16 pi^2 by construction
  chain.member =
      d.constant_width() && w / l <= rho && slope <= cls.max_slope;
  return chain;
}

}  // namespace nbl
