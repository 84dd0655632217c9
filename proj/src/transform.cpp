#include "nbl/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nbl {

double SymMat2::eig_max() const {
  double m = 0.5 * (a11 + a22);
  double r = std::hypot(0.5 * (a11 - a22), a12);
  return m + r;
}

double SymMat2::eig_min() const {
  double m = 0.5 * (a11 + a22);
  double r = std::hypot(0.5 * (a11 - a22), a12);
  double hi = m + r;
  if (hi > 0.0) return det() / hi;
  return m - r;
}

FormCoefficients parallelogram_form(const Parallelogram& p) {
  double area = p.area();
  double c = std::cos(p.phi());
  SymMat2 a{p.l2() * p.l2() / area, -p.l1() * p.l2() * c / area,
            p.l1() * p.l1() / area};
  FormCoefficients fc;
  fc.matrix = [a](double, double) { return a; };
  fc.weight = [area](double, double) { return area; };
  fc.is_constant = true;
  return fc;
}

FormCoefficients strip_form(const StripDomain& d) {
  double l = d.length();
  // Copies keep the coefficients valid after the domain goes away.
  Profile lower = d.lower();
  Profile upper = d.upper();
  FormCoefficients fc;
  fc.matrix = [l, lower, upper](double s, double t) {
    double x = l * s;
    double g1 = lower.derivative(x);
    double w = upper.value(x) - lower.value(x);
    double w1 = upper.derivative(x) - lower.derivative(x);
    double q = g1 + t * w1;
    return SymMat2{w / l, -q, l * (1.0 + q * q) / w};
  };
  fc.weight = [l, lower, upper](double s, double) {
    double x = l * s;
    return l * (upper.value(x) - lower.value(x));
  };
  fc.is_constant = d.constant_width() && d.constant_lower_slope();
  return fc;
}

SpdReport spd_certify(const FormCoefficients& fc, int n) {
  if (n < 1) throw std::invalid_argument("spd_certify grid must have n >= 1");
  SpdReport rep;
  rep.grid_n = n;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_eigenvalue = 0.0;
  rep.min_weight = std::numeric_limits<double>::infinity();
  rep.max_weight = 0.0;
  rep.max_condition = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      double s = static_cast<double>(i) / n;
      double t = static_cast<double>(j) / n;
      SymMat2 a = fc.matrix(s, t);
      double lo = a.eig_min();
      double hi = a.eig_max();
      double w = fc.weight(s, t);
      if (!(lo > 0.0) || !std::isfinite(hi)) {
        throw NotSPD("coefficient matrix not positive definite", s, t);
      }
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw NotSPD("weight not positive", s, t);
      }
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo);
      rep.max_eigenvalue = std::max(rep.max_eigenvalue, hi);
      rep.min_weight = std::min(rep.min_weight, w);
      rep.max_weight = std::max(rep.max_weight, w);
      rep.max_condition = std::max(rep.max_condition, hi / lo);
    }
  }
  return rep;
}

}  // namespace nbl
