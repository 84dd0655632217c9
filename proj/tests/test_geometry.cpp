#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

#include "nbl/geometry.hpp"

using namespace nbl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSinArc = 3.820197789027712;  // integral_0^pi sqrt(1+cos^2)

StripDomain make_omega_eps(double eps) {
  std::vector<TrigTerm> terms{{1.0, 1, TrigKind::sin}};
  WidthProfile g(0.0, 0.0, terms);
  WidthProfile h(kPi + 2.0 * eps, 0.0, terms);
  return StripDomain(kPi, bind_profile(g, kPi), bind_profile(h, kPi));
}

}  // namespace

TEST_CASE("parallelogram validation") {
  CHECK_THROWS_AS(Parallelogram(0.0, 1.0, 1.0), DegenerateDomain);
  CHECK_THROWS_AS(Parallelogram(1.0, -2.0, 1.0), DegenerateDomain);
  CHECK_THROWS_AS(Parallelogram(1.0, 1.0, 0.0), DegenerateDomain);
  CHECK_THROWS_AS(Parallelogram(1.0, 1.0, kPi), DegenerateDomain);
  CHECK_THROWS_AS(Parallelogram(1.0, 1.0, std::nan("")), DegenerateDomain);
}

TEST_CASE("canonical order l1 <= l2") {
  Parallelogram p(2.0, 1.0, kPi / 3);
  CHECK(p.l1() == 1.0);
  CHECK(p.l2() == 2.0);
  CHECK(p.phi() == kPi / 3);
}

TEST_CASE("area and perimeter") {
  Parallelogram p(1.0, 2.0, kPi / 3);
  CHECK(p.area() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(p.perimeter() == 6.0);
}

TEST_CASE("shape predicates") {
  CHECK(Parallelogram(1.0, 2.0, kPi / 2).is_rectangle());
  CHECK_FALSE(Parallelogram(1.0, 2.0, kPi / 2 + 1e-6).is_rectangle());
  CHECK(Parallelogram(1.5, 1.5, kPi / 2).is_square());
  CHECK_FALSE(Parallelogram(1.0, 2.0, kPi / 2).is_square());
}

TEST_CASE("from vectors") {
  Parallelogram p = parallelogram_from_vectors(Vec2{1.0, 0.0},
                                               Vec2{0.3, 0.7});
  CHECK(p.l1() == doctest::Approx(std::sqrt(0.58)).epsilon(1e-15));
  CHECK(p.l2() == 1.0);
  CHECK(p.phi() == doctest::Approx(std::atan2(0.7, 0.3)).epsilon(1e-15));
  // |det| is the area regardless of parameterization.
  CHECK(p.area() == doctest::Approx(0.7).epsilon(1e-14));

  CHECK_THROWS_AS(
      parallelogram_from_vectors(Vec2{1.0, 1.0}, Vec2{-2.0, -2.0}),
      DegenerateDomain);
  CHECK_THROWS_AS(parallelogram_from_vectors(Vec2{0.0, 0.0}, Vec2{1.0, 0.0}),
                  DegenerateDomain);
}

TEST_CASE("from vectors scaling covariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    Vec2 v1{unif(rng), unif(rng)};
    Vec2 v2{unif(rng), unif(rng)};
    double det = v1.x * v2.y - v1.y * v2.x;
    if (std::abs(det) < 1e-3) continue;
    double c = 0.25 + 3.0 * std::abs(unif(rng));
    Parallelogram p = parallelogram_from_vectors(v1, v2);
    Parallelogram q = parallelogram_from_vectors(Vec2{c * v1.x, c * v1.y},
                                                 Vec2{c * v2.x, c * v2.y});
    CHECK(q.l1() == doctest::Approx(c * p.l1()).epsilon(1e-13));
    CHECK(q.l2() == doctest::Approx(c * p.l2()).epsilon(1e-13));
    CHECK(q.phi() == doctest::Approx(p.phi()).epsilon(1e-13));
  }
}

TEST_CASE("spanning vectors round trip") {
  Parallelogram p(0.8, 1.9, 2.0);
  auto v = p.spanning_vectors();
  Parallelogram q = parallelogram_from_vectors(v[0], v[1]);
  CHECK(q.l1() == doctest::Approx(p.l1()).epsilon(1e-14));
  CHECK(q.l2() == doctest::Approx(p.l2()).epsilon(1e-14));
  CHECK(q.phi() == doctest::Approx(p.phi()).epsilon(1e-14));
}

TEST_CASE("width profile evaluation and exact derivative") {
  WidthProfile w(0.2, 0.1,
                 {{0.05, 2, TrigKind::sin}, {-0.03, 3, TrigKind::cos}});
  const double length = 1.7;
  CHECK(w.max_frequency() == 3);

  Profile bound = bind_profile(w, length);
  REQUIRE(bound.spec.has_value());
  CHECK(bound.max_frequency == 3);
  const double h = 1e-6;
  for (int i = 1; i < 100; ++i) {
    double x = length * i / 100.0;
    double expect = 0.2 + 0.1 * x + 0.05 * std::sin(2 * kPi * x / length) -
                    0.03 * std::cos(3 * kPi * x / length);
    CHECK(bound.value(x) == doctest::Approx(expect).epsilon(1e-14));
    double fd = (bound.value(x + h) - bound.value(x - h)) / (2 * h);
    CHECK(bound.derivative(x) == doctest::Approx(fd).epsilon(1e-7));
  }

  CHECK_THROWS_AS(WidthProfile(0.0, 0.0, {{1.0, 0, TrigKind::sin}}),
                  DegenerateDomain);
}

TEST_CASE("constant profile") {
  Profile c = constant_profile(0.7);
  CHECK(c.value(0.3) == 0.7);
  CHECK(c.derivative(0.5) == 0.0);
  CHECK(c.max_frequency == 0);
  REQUIRE(c.spec.has_value());
}

TEST_CASE("strip domain of constant width around sin") {
  const double eps = 0.05;
  StripDomain d = make_omega_eps(eps);
  const double width = kPi + 2.0 * eps;

  CHECK(d.length() == kPi);
  CHECK(d.constant_width());
  CHECK(d.min_width() == doctest::Approx(width).epsilon(1e-14));
  CHECK(d.max_width() == doctest::Approx(width).epsilon(1e-14));
  CHECK_FALSE(d.constant_lower_slope());
  CHECK(d.sup_lower_slope() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.area() == doctest::Approx(kPi * width).epsilon(1e-12));
  CHECK(d.perimeter() ==
        doctest::Approx(2.0 * kSinArc + 2.0 * width).epsilon(1e-10));
  CHECK(d.width(1.0) == doctest::Approx(width).epsilon(1e-14));
  CHECK(d.lower_value(kPi / 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.max_frequency() == 1);
}

TEST_CASE("strip rejects vanishing width") {
  WidthProfile g(0.0, 0.0, {});
  WidthProfile h(0.5, 0.0, {{-0.6, 1, TrigKind::sin}});
  CHECK_THROWS_AS(
      StripDomain(1.0, bind_profile(g, 1.0), bind_profile(h, 1.0)),
      DegenerateDomain);
  CHECK_THROWS_AS(
      StripDomain(-1.0, constant_profile(0.0), constant_profile(1.0)),
      DegenerateDomain);
}

TEST_CASE("strip detects genuinely varying width") {
  WidthProfile g(0.0, 0.0, {});
  WidthProfile h(1.0, 0.0, {{0.2, 1, TrigKind::sin}});
  StripDomain d(2.0, bind_profile(g, 2.0), bind_profile(h, 2.0));
  CHECK_FALSE(d.constant_width());
  CHECK(d.min_width() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.max_width() == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("rectangle strip") {
  StripDomain d(2.0, constant_profile(0.0), constant_profile(0.5));
  CHECK(d.constant_width());
  CHECK(d.constant_lower_slope());
  CHECK(d.sup_lower_slope() == 0.0);
  CHECK(d.area() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(d.perimeter() == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("domain variant helpers") {
  Domain p = Parallelogram(1.0, 2.0, kPi / 2);
  CHECK(area(p) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(perimeter(p) == 6.0);
  Domain s = StripDomain(2.0, constant_profile(0.0), constant_profile(1.0));
  CHECK(area(s) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(perimeter(s) == doctest::Approx(6.0).epsilon(1e-13));
}
