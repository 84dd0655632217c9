#pragma once

#include <functional>

#include "nbl/geometry.hpp"

namespace nbl {

struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  double det() const { return a11 * a22 - a12 * a12; }
  double trace() const { return a11 + a22; }
  // Stable for (near-)positive matrices: the small eigenvalue comes from
  // det / eig_max instead of the cancelling difference.
  double eig_max() const;
  double eig_min() const;
};

// Coefficients of the pulled-back form on the unit square:
//   b(u, u) = integral <A grad u, grad u>,  norm = integral w |u|^2.
struct FormCoefficients {
  std::function<SymMat2(double s, double t)> matrix;
  std::function<double(double s, double t)> weight;
  bool is_constant = false;
};

// Pullback of a parallelogram under the affine map from the unit square.
// A is constant; the weight equals the area.
FormCoefficients parallelogram_form(const Parallelogram& p);

// Pullback of a strip under (x, y) -> (x/l, (y - g(x)) / d(x)).
// Constant exactly when the width and the lower slope are both constant.
FormCoefficients strip_form(const StripDomain& d);

struct SpdReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double min_weight = 0.0;
  double max_weight = 0.0;
  double max_condition = 0.0;
  int grid_n = 0;
};

// Checks A(s,t) > 0 and w(s,t) > 0 on the (n+1)^2 uniform grid.
// Throws NotSPD at the first offending point.
SpdReport spd_certify(const FormCoefficients& fc, int n);

}  // namespace nbl
