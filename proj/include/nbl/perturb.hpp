#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nbl/geometry.hpp"
#include "nbl/solver.hpp"

namespace nbl {

// Nonnegative boundary bump on [0,1], symmetric about the midpoint and
// vanishing at the ends; drives the bottom-edge deformation of the square.
class BumpProfile {
 public:
  BumpProfile(std::function<double(double)> value,
              std::function<double(double)> derivative,
              bool restricted_support, std::string name);

  double value(double x) const { return value_(x); }
  double derivative(double x) const { return derivative_(x); }
  // Support confined to (0, 1/4) union (3/4, 1).
  bool restricted_support() const { return restricted_; }
  double max_value() const { return max_value_; }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double)> value_, derivative_;
  bool restricted_ = false;
  double max_value_ = 0.0;
  std::string name_;
};

// Mirror pair of quartic bumps on (0, 1/4) and (3/4, 1), normalized to
// integral one.
BumpProfile standard_bump();
// Full-support counterexample shape: both diagonal entries change sign.
BumpProfile sine_squared_bump();
BumpProfile zero_bump();

// First-variation matrix of the degenerate eigenvalue pi^2 of the unit
// square under the bump deformation, in the basis of the two nontrivial
// eigenfunctions.  alpha1/alpha2 are the negated diagonal entries.
struct HadamardMatrix {
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;
  double alpha1 = 0.0;  // 2 pi^2 integral cos(2 pi x) f
  double alpha2 = 0.0;  // 2 pi^2 integral f
};

HadamardMatrix hadamard_matrix(const BumpProfile& f);

// Strip with bottom boundary -t*f and flat top at height 1.  Negative t
// pushes the bottom edge into the square (non-convex dent).
StripDomain deformed_domain(double t, const BumpProfile& f);

struct PerturbOptions {
  int n = 48;  // fine grid; coarse companion n/2
  int k = 4;
  EigenOptions eigen;
  int threads = 0;
};

struct BranchSample {
  double t = 0.0;
  double l = 0.0;  // perimeter of the deformed domain
  double mu2 = 0.0, mu3 = 0.0;
  double mu2_err = 0.0, mu3_err = 0.0;
  double f_value = 0.0;  // mu2 * l^2
  bool branch_ambiguity = false;
};

struct PerturbationReport {
  HadamardMatrix m;
  std::vector<BranchSample> samples;  // in t_list order
  BranchSample reference;             // t = 0 through the same pipeline
  // One-sided Richardson slopes at t -> 0^- for the ordered branches.
  double fd_slope_mu2 = 0.0;
  double fd_slope_mu3 = 0.0;
  double predicted_slope_lo = 0.0;  // -alpha2
  double predicted_slope_hi = 0.0;  // -alpha1
  double t_star = 0.0;       // widest negative prefix with F > 16 pi^2
  double l_exponent = 0.0;   // fitted slope of log|L(t)-4| vs log|t|
};

// Solves the deformed family and compares branch slopes against the
// first-variation prediction.  t_list needs at least 4 magnitudes in
// geometric progression within [-0.1, 0.1] excluding 0.
PerturbationReport derivative_check(const BumpProfile& f,
                                    const std::vector<double>& t_list,
                                    const PerturbOptions& opts = {});

void write_perturb_csv(std::ostream& out, const PerturbationReport& rep);
std::string perturb_report_json(const PerturbationReport& rep);

}  // namespace nbl
