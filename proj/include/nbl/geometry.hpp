#pragma once

#include <array>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "nbl/errors.hpp"

namespace nbl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Planar parallelogram stored by side lengths and the angle between them,
// canonicalized so that l1 <= l2.  Position and orientation are irrelevant
// for everything downstream, so they are not kept.
class Parallelogram {
 public:
  Parallelogram(double l1, double l2, double phi);

  double l1() const { return l1_; }
  double l2() const { return l2_; }
  double phi() const { return phi_; }

  double area() const;       // l1 * l2 * sin(phi)
  double perimeter() const;  // 2 * (l1 + l2)

  bool is_rectangle(double tol = 1e-12) const;
  bool is_square(double tol = 1e-12) const;

  // Canonical embedding: first side along the positive x axis.
  std::array<Vec2, 2> spanning_vectors() const;

 private:
  double l1_, l2_, phi_;
};

// Builds the canonical representative from two spanning vectors.
// Throws DegenerateDomain when the vectors are (nearly) collinear.
Parallelogram parallelogram_from_vectors(const Vec2& v1, const Vec2& v2);

enum class TrigKind { sin, cos };

struct TrigTerm {
  double amplitude = 0.0;
  int frequency = 1;  // argument is frequency * pi * x / length
  TrigKind kind = TrigKind::sin;
};

// Boundary profile from the closed-under-differentiation class
//   c0 + c1*x + sum_k amp_k * trig(k*pi*x/length),
// so derivatives are exact rather than numerical.
class WidthProfile {
 public:
  WidthProfile() = default;
  WidthProfile(double offset, double slope, std::vector<TrigTerm> terms);

  double value(double x, double length) const;
  double derivative(double x, double length) const;
  int max_frequency() const;

  double offset() const { return offset_; }
  double slope() const { return slope_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }

 private:
  double offset_ = 0.0;
  double slope_ = 0.0;
  std::vector<TrigTerm> terms_;
};

// A boundary curve bound to a concrete strip length.  Most profiles come
// from WidthProfile; the perturbation module supplies piecewise-polynomial
// bumps, so value and derivative stay open-ended callables.
struct Profile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  // Largest k such that trig(k*pi*x/length) appears; used to size
  // quadratures that must be exact on the trig class.  0 = no trig content
  // (callers fall back to adaptive quadrature when the profile is generic).
  int max_frequency = 0;
  // Set when the profile is expressible in the serializable class.
  std::optional<WidthProfile> spec;
};

Profile bind_profile(const WidthProfile& p, double length);
Profile constant_profile(double c);

// Curvilinear strip {0 < x < length, lower(x) < y < upper(x)}.
// Construction samples the width on a fixed 4096-interval grid and rejects
// profiles whose width drops below the 1e-9 safety margin anywhere.
class StripDomain {
 public:
  StripDomain(double length, Profile lower, Profile upper);

  double length() const { return length_; }
  const Profile& lower() const { return lower_; }
  const Profile& upper() const { return upper_; }

  double lower_value(double x) const { return lower_.value(x); }
  double upper_value(double x) const { return upper_.value(x); }
  double width(double x) const { return upper_.value(x) - lower_.value(x); }
  double width_derivative(double x) const {
    return upper_.derivative(x) - lower_.derivative(x);
  }

  bool constant_width() const { return constant_width_; }
  bool constant_lower_slope() const { return constant_lower_slope_; }
  double min_width() const { return min_width_; }
  double max_width() const { return max_width_; }
  double sup_lower_slope() const { return sup_lower_slope_; }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }

  int max_frequency() const;

 private:
  double length_;
  Profile lower_, upper_;
  bool constant_width_ = false;
  bool constant_lower_slope_ = false;
  double min_width_ = 0.0, max_width_ = 0.0;
  double sup_lower_slope_ = 0.0;
  double area_ = 0.0, perimeter_ = 0.0;
};

using Domain = std::variant<Parallelogram, StripDomain>;

double area(const Domain& d);
double perimeter(const Domain& d);

}  // namespace nbl
