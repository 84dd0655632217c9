#include "nbl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "nbl/quadrature.hpp"

namespace nbl {
namespace {

constexpr int kWidthGridIntervals = 4096;
constexpr double kWidthMargin = 1e-9;
constexpr double kConstancyTol = 1e-12;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

Parallelogram::Parallelogram(double l1, double l2, double phi)
    : l1_(l1), l2_(l2), phi_(phi) {
  if (!finite_positive(l1_) || !finite_positive(l2_)) {
    throw DegenerateDomain("parallelogram side lengths must be positive");
  }
  if (!std::isfinite(phi_) || phi_ <= 0.0 || phi_ >= std::numbers::pi) {
    throw DegenerateDomain("parallelogram angle must lie in (0, pi)");
  }
  if (l1_ > l2_) std::swap(l1_, l2_);
}

double Parallelogram::area() const { return l1_ * l2_ * std::sin(phi_); }

double Parallelogram::perimeter() const { return 2.0 * (l1_ + l2_); }

bool Parallelogram::is_rectangle(double tol) const {
  return std::abs(std::cos(phi_)) <= tol;
}

bool Parallelogram::is_square(double tol) const {
  return is_rectangle(tol) && std::abs(l2_ - l1_) <= tol * l2_;
}

std::array<Vec2, 2> Parallelogram::spanning_vectors() const {
  return {Vec2{l1_, 0.0},
          Vec2{l2_ * std::cos(phi_), l2_ * std::sin(phi_)}};
}

Parallelogram parallelogram_from_vectors(const Vec2& v1, const Vec2& v2) {
  double n1 = std::hypot(v1.x, v1.y);
  double n2 = std::hypot(v2.x, v2.y);
  if (!finite_positive(n1) || !finite_positive(n2)) {
    throw DegenerateDomain("spanning vectors must be nonzero");
  }
  double det = v1.x * v2.y - v1.y * v2.x;
  if (std::abs(det) <= 1e-14 * n1 * n2) {
    throw DegenerateDomain("spanning vectors are collinear");
  }
  double dot = v1.x * v2.x + v1.y * v2.y;
  double phi = std::atan2(std::abs(det), dot);  // in (0, pi)
  return Parallelogram(n1, n2, phi);
}

WidthProfile::WidthProfile(double offset, double slope,
                           std::vector<TrigTerm> terms)
    : offset_(offset), slope_(slope), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.frequency < 1) {
      throw DegenerateDomain("trig term frequency must be >= 1");
    }
    if (!std::isfinite(t.amplitude)) {
      throw DegenerateDomain("trig term amplitude must be finite");
    }
  }
  if (!std::isfinite(offset_) || !std::isfinite(slope_)) {
    throw DegenerateDomain("profile coefficients must be finite");
  }
}

double WidthProfile::value(double x, double length) const {
  double v = offset_ + slope_ * x;
  for (const auto& t : terms_) {
    double arg = t.frequency * std::numbers::pi * x / length;
    v += t.amplitude * (t.kind == TrigKind::sin ? std::sin(arg) : std::cos(arg));
  }
  return v;
}

double WidthProfile::derivative(double x, double length) const {
  double v = slope_;
  for (const auto& t : terms_) {
    double omega = t.frequency * std::numbers::pi / length;
    double arg = omega * x;
    v += t.amplitude * omega *
         (t.kind == TrigKind::sin ? std::cos(arg) : -std::sin(arg));
  }
  return v;
}

int WidthProfile::max_frequency() const {
  int k = 0;
  for (const auto& t : terms_) {
    if (t.amplitude != 0.0) k = std::max(k, t.frequency);
  }
  return k;
}

Profile bind_profile(const WidthProfile& p, double length) {
  if (!finite_positive(length)) {
    throw DegenerateDomain("profile length must be positive");
  }
  Profile out;
  out.value = [p, length](double x) { return p.value(x, length); };
  out.derivative = [p, length](double x) { return p.derivative(x, length); };
  out.max_frequency = p.max_frequency();
  out.spec = p;
  return out;
}

Profile constant_profile(double c) {
  Profile out;
  out.value = [c](double) { return c; };
  out.derivative = [](double) { return 0.0; };
  out.max_frequency = 0;
  out.spec = WidthProfile(c, 0.0, {});
  return out;
}

StripDomain::StripDomain(double length, Profile lower, Profile upper)
    : length_(length), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (!finite_positive(length_)) {
    throw DegenerateDomain("strip length must be positive");
  }
  if (!lower_.value || !lower_.derivative || !upper_.value ||
      !upper_.derivative) {
    throw DegenerateDomain("strip profiles must provide value and derivative");
  }

  double wmin = std::numeric_limits<double>::infinity();
  double wmax = -wmin;
  double smin = wmin, smax = -wmin, sabs = 0.0;
  for (int i = 0; i <= kWidthGridIntervals; ++i) {
    double x = length_ * static_cast<double>(i) / kWidthGridIntervals;
    double w = upper_.value(x) - lower_.value(x);
    if (!std::isfinite(w)) {
      throw DegenerateDomain("strip width is not finite");
    }
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
    double s = lower_.derivative(x);
    smin = std::min(smin, s);
    smax = std::max(smax, s);
    sabs = std::max(sabs, std::abs(s));
  }
  if (wmin < kWidthMargin) {
    throw DegenerateDomain("strip width drops below the positivity margin");
  }
  min_width_ = wmin;
  max_width_ = wmax;
  sup_lower_slope_ = sabs;
  constant_width_ = (wmax - wmin) <= kConstancyTol * std::max(1.0, wmax);
  constant_lower_slope_ =
      (smax - smin) <= kConstancyTol * std::max(1.0, sabs);

  area_ = quad::integrate_adaptive(
      [this](double x) { return width(x); }, 0.0, length_, 1e-12);
  auto arc = [this](const Profile& p) {
    return quad::integrate_adaptive(
        [&p](double x) { return std::hypot(1.0, p.derivative(x)); }, 0.0,
        length_, 1e-10);
  };
  perimeter_ = width(0.0) + width(length_) + arc(lower_) + arc(upper_);
}

int StripDomain::max_frequency() const {
  return std::max(lower_.max_frequency, upper_.max_frequency);
}

double area(const Domain& d) {
  return std::visit([](const auto& g) { return g.area(); }, d);
}

double perimeter(const Domain& d) {
  return std::visit([](const auto& g) { return g.perimeter(); }, d);
}

}  // namespace nbl
