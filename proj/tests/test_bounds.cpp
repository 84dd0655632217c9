#include <Eigen/Dense>
#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>

#include "nbl/bounds.hpp"
#include "nbl/transform.hpp"

using namespace nbl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

StripDomain make_omega_eps(double eps) {
  std::vector<TrigTerm> terms{{1.0, 1, TrigKind::sin}};
  WidthProfile g(0.0, 0.0, terms);
  WidthProfile h(kPi + 2.0 * eps, 0.0, terms);
  return StripDomain(kPi, bind_profile(g, kPi), bind_profile(h, kPi));
}

// The lam pair solves a 2x2 matrix eigenproblem; rebuild it directly.
std::pair<double, double> lam_by_eigensolver(const Parallelogram& p) {
  double a1 = p.l1() * p.l1(), a2 = p.l2() * p.l2();
  double c = (8.0 / kPi2) * p.l1() * p.l2() * std::cos(p.phi());
  Eigen::Matrix2d m;
  m << a1, -c, -c, a2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  double scale = kPi2 / (p.area() * p.area());
  return {scale * es.eigenvalues()[0], scale * es.eigenvalues()[1]};
}

std::pair<double, double> eta_by_eigensolver(const Parallelogram& p) {
  double a1 = p.l1() * p.l1(), a2 = p.l2() * p.l2();
  double c = p.l1() * p.l2() * std::cos(p.phi());
  Eigen::Matrix2d m;
  m << a1, -c, -c, a2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  double scale = 12.0 / (p.area() * p.area());
  return {scale * es.eigenvalues()[0], scale * es.eigenvalues()[1]};
}

}  // namespace

TEST_CASE("square closed forms") {
  ParallelogramBounds b = parallelogram_bounds(Parallelogram(1, 1, kPi / 2));
  CHECK(std::abs(b.lam_minus - kPi2) <= 1e-12);
  CHECK(std::abs(b.lam_plus - kPi2) <= 1e-12);
  CHECK(std::abs(b.eta_minus - 12.0) <= 1e-12);
  CHECK(std::abs(b.eta_plus - 12.0) <= 1e-12);
  CHECK(b.mu2_bound == doctest::Approx(kPi2).epsilon(1e-14));
  CHECK(b.mu3_bound == doctest::Approx(kPi2).epsilon(1e-14));
  CHECK(b.mu2_tight);
  CHECK(b.mu3_tight);
}

TEST_CASE("rhombus pi/4 closed forms") {
  ParallelogramBounds b = parallelogram_bounds(Parallelogram(1, 1, kPi / 4));
  double rt2 = std::sqrt(2.0);
  double lam_minus = 2.0 * (kPi2 - 8.0 / rt2);
  double eta_minus = 2.0 * (12.0 - 12.0 / rt2);
  CHECK(std::abs(b.lam_minus - lam_minus) <= 1e-12);
  CHECK(std::abs(b.eta_minus - eta_minus) <= 1e-12);
  CHECK(b.eta_minus < b.lam_minus);
  CHECK(b.mu2_bound == b.eta_minus);
  CHECK_FALSE(b.mu2_tight);
  CHECK_FALSE(b.mu3_tight);

  RhombusBounds r = rhombus_bounds(1.0, kPi / 4);
  CHECK(r.lam_minus == doctest::Approx(b.lam_minus).epsilon(1e-14));
  CHECK(r.lam_plus == doctest::Approx(b.lam_plus).epsilon(1e-14));
  CHECK(r.eta_minus == doctest::Approx(b.eta_minus).epsilon(1e-14));
  CHECK(r.eta_plus == doctest::Approx(b.eta_plus).epsilon(1e-14));
}

TEST_CASE("rhombus pi/3 closed forms") {
  RhombusBounds r = rhombus_bounds(1.0, kPi / 3);
  CHECK(r.lam_minus == doctest::Approx((4.0 / 3.0) * (kPi2 - 4.0))
                           .epsilon(1e-14));
  CHECK(r.eta_minus == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("bounds agree with direct 2x2 eigensolves") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 500; ++it) {
    double l1 = 0.2 + 2.0 * unif(rng);
    double l2 = 0.2 + 2.0 * unif(rng);
    double phi = 0.05 + (kPi - 0.1) * unif(rng);
    Parallelogram p(l1, l2, phi);
    ParallelogramBounds b = parallelogram_bounds(p);
    auto [lm, lp] = lam_by_eigensolver(p);
    auto [em, ep] = eta_by_eigensolver(p);
    CHECK(b.lam_minus == doctest::Approx(lm).epsilon(1e-10));
    CHECK(b.lam_plus == doctest::Approx(lp).epsilon(1e-12));
    // The reference eigensolver itself loses digits when sin(phi) is small,
    // so the minus branch is compared more loosely.
    CHECK(b.eta_minus == doctest::Approx(em).epsilon(1e-9));
    CHECK(b.eta_plus == doctest::Approx(ep).epsilon(1e-12));
  }
}

TEST_CASE("eta pair equals scaled pullback eigenvalues") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    Parallelogram p(0.3 + unif(rng), 0.3 + unif(rng),
                    0.1 + (kPi - 0.2) * unif(rng));
    FormCoefficients fc = parallelogram_form(p);
    SymMat2 a = fc.matrix(0.0, 0.0);
    ParallelogramBounds b = parallelogram_bounds(p);
    double scale = 12.0 / p.area();
    CHECK(b.eta_minus == doctest::Approx(scale * a.eig_min()).epsilon(1e-10));
    CHECK(b.eta_plus == doctest::Approx(scale * a.eig_max()).epsilon(1e-11));
  }
}

TEST_CASE("structural properties of the bound pairs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 500; ++it) {
    double l1 = 0.2 + 2.0 * unif(rng);
    double l2 = 0.2 + 2.0 * unif(rng);
    double phi = 0.05 + (kPi - 0.1) * unif(rng);
    Parallelogram p(l1, l2, phi);
    ParallelogramBounds b = parallelogram_bounds(p);

    CHECK(b.lam_minus > 0.0);
    CHECK(b.lam_minus <= b.lam_plus);
    CHECK(b.eta_minus <= b.eta_plus);
    // The affine top never beats the cosine top.
    CHECK(b.lam_plus < b.eta_plus);
    CHECK(b.mu2_bound == std::min(b.lam_minus, b.eta_minus));
    CHECK(b.mu3_bound == b.lam_plus);
    double s = l1 * l1 + l2 * l2;
    CHECK((b.lam_minus + b.lam_plus) / 2 ==
          doctest::Approx(kPi2 * s / (2 * p.area() * p.area()))
              .epsilon(1e-11));
    CHECK(b.mean == doctest::Approx((b.lam_minus + b.lam_plus) / 2)
                        .epsilon(1e-11));

    // Angle reflection symmetry.
    ParallelogramBounds br = parallelogram_bounds(
        Parallelogram(l1, l2, kPi - phi));
    CHECK(br.lam_minus == doctest::Approx(b.lam_minus).epsilon(1e-12));
    CHECK(br.eta_plus == doctest::Approx(b.eta_plus).epsilon(1e-12));

    // Eigenvalue bounds scale like 1/length^2.
    double c = 0.5 + 2.0 * unif(rng);
    ParallelogramBounds bs = parallelogram_bounds(
        Parallelogram(c * l1, c * l2, phi));
    CHECK(bs.lam_minus ==
          doctest::Approx(b.lam_minus / (c * c)).epsilon(1e-12));
    CHECK(bs.eta_minus ==
          doctest::Approx(b.eta_minus / (c * c)).epsilon(1e-12));
  }
}

TEST_CASE("conjugate switch is seamless for near-degenerate minus branch") {
  // cos(phi) ~ 0 and l1 = l2 sends the root toward the sum.
  for (double dc : {1e-2, 1e-4, 1e-6, 1e-8}) {
    double phi = std::acos(dc);
    Parallelogram p(1.0, 1.0, phi);
    ParallelogramBounds b = parallelogram_bounds(p);
    auto [lm, lp] = lam_by_eigensolver(p);
    CHECK(b.lam_minus == doctest::Approx(lm).epsilon(1e-9));
    // Exact conjugate evaluation for the equal-sides case.
    double area2 = p.area() * p.area();
    double s = 2.0;
    double root = std::sqrt((256.0 / (kPi2 * kPi2)) * dc * dc);
    double conj = 4.0 * (1.0 - (64.0 / (kPi2 * kPi2)) * dc * dc);
    double expect = kPi2 * conj / (2.0 * area2 * (s + root));
    CHECK(b.lam_minus == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("rectangle exact eigenvalues") {
  CHECK(rectangle_mu2(1.0, 2.0) == doctest::Approx(kPi2 / 4).epsilon(1e-15));
  CHECK(rectangle_mu3(1.0, 2.0) == doctest::Approx(kPi2).epsilon(1e-15));
  CHECK(rectangle_mu2(1.0, 3.0) == doctest::Approx(kPi2 / 9).epsilon(1e-15));
  CHECK(rectangle_mu3(1.0, 3.0) ==
        doctest::Approx(4 * kPi2 / 9).epsilon(1e-15));
  CHECK(rectangle_mu3(2.0, 1.0) == rectangle_mu3(1.0, 2.0));

  // Bounds reproduce the exact values on rectangles.
  ParallelogramBounds b = parallelogram_bounds(Parallelogram(1, 2, kPi / 2));
  CHECK(b.lam_minus == doctest::Approx(kPi2 / 4).epsilon(1e-13));
  CHECK(b.lam_plus == doctest::Approx(kPi2).epsilon(1e-13));
  CHECK(b.mu2_tight);
  CHECK(b.mu3_tight);
  ParallelogramBounds b3 = parallelogram_bounds(Parallelogram(1, 3, kPi / 2));
  CHECK(b3.mu2_tight);
  CHECK_FALSE(b3.mu3_tight);  // mu3 = 4 pi^2 / 9 sits strictly below lam_plus
  CHECK(rectangle_mu3(1.0, 3.0) < b3.lam_plus);
}

TEST_CASE("strip bounds on the constant-width sin strip") {
  StripBounds b = strip_bounds(make_omega_eps(0.05));
  double d = kPi + 0.1;
  CHECK(b.length == kPi);
  CHECK(b.width == doctest::Approx(d).epsilon(1e-14));
  CHECK(b.i1 == doctest::Approx(1.5 * kPi).epsilon(1e-14));
  CHECK(std::abs(b.i2) <= 1e-12);
  // Width exceeds sqrt(i1 * l) here, so the minus branch is pi^2 / l^2 = 1.
  CHECK(b.lam_minus == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(b.lam_minus > kPi2 / (kPi * d));
  CHECK(b.mu2_simple == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(b.mu2_bound == b.lam_minus);
  CHECK(b.mean ==
        doctest::Approx(0.5 * kPi2 * (1.0 / kPi2 + 1.5 * kPi / (kPi * d * d)))
            .epsilon(1e-13));
}

TEST_CASE("strip bounds match a direct 2x2 eigensolve") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    double l = 1.0 + 3.0 * unif(rng);
    double d = 0.3 + 0.6 * unif(rng);
    int k = 1 + static_cast<int>(rng() % 3);
    double amp = (0.05 + 0.2 * unif(rng)) * l / (k * kPi);
    std::vector<TrigTerm> terms{{amp, k, TrigKind::sin}};
    WidthProfile g(0.0, 0.0, terms);
    WidthProfile h(d, 0.0, terms);
    StripDomain dom(l, bind_profile(g, l), bind_profile(h, l));
    StripBounds b = strip_bounds(dom);

    Eigen::Matrix2d m;
    m << 0.5 * kPi2 * d / l, -(2.0 * kPi / l) * b.i2,
        -(2.0 * kPi / l) * b.i2, 0.5 * kPi2 * b.i1 / d;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    double scale = 2.0 / (l * d);
    CHECK(b.lam_minus ==
          doctest::Approx(scale * es.eigenvalues()[0]).epsilon(1e-11));
    CHECK(b.lam_plus ==
          doctest::Approx(scale * es.eigenvalues()[1]).epsilon(1e-11));
    CHECK(b.lam_minus <= b.mu2_simple * (1 + 1e-12));
  }
}

TEST_CASE("strip bounds reject varying width") {
  WidthProfile g(0.0, 0.0, {});
  WidthProfile h(1.0, 0.0, {{0.2, 1, TrigKind::sin}});
  StripDomain d(2.0, bind_profile(g, 2.0), bind_profile(h, 2.0));
  CHECK_THROWS_AS(strip_bounds(d), NotConstantWidth);
}

TEST_CASE("rectangle strip bounds match the rectangle formulas") {
  StripDomain rect(2.0, constant_profile(0.0), constant_profile(1.0));
  StripBounds b = strip_bounds(rect);
  CHECK(b.i1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b.i2 == doctest::Approx(0.0));
  CHECK(b.lam_minus == doctest::Approx(kPi2 / 4).epsilon(1e-13));
  CHECK(b.lam_plus == doctest::Approx(kPi2).epsilon(1e-13));
}

TEST_CASE("nonconvex class parameters") {
  NonconvexClassBound c = nonconvex_class_bound(0.5);
  CHECK(std::abs(c.max_slope - std::sqrt(1.25)) <= 1e-15);
  CHECK(c.product_bound == kProductLimit);
  CHECK_THROWS_AS(nonconvex_class_bound(0.0), DegenerateDomain);
  CHECK_THROWS_AS(nonconvex_class_bound(1.5), DegenerateDomain);

  // rho = 1 admits only flat strips.
  CHECK(nonconvex_class_bound(1.0).max_slope == doctest::Approx(0.0));
}

TEST_CASE("nonconvex chain ordering") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double rho : {0.3, 0.5, 0.8}) {
    double cap = nonconvex_class_bound(rho).max_slope;
    for (int it = 0; it < 20; ++it) {
      double l = (1.0 + unif(rng)) / rho;
      int k = 1 + static_cast<int>(rng() % 3);
      double target = (0.2 + 0.6 * unif(rng)) * cap;
      double amp = target * l / (k * kPi);
      std::vector<TrigTerm> terms{{amp, k, TrigKind::sin}};
      WidthProfile g(0.0, 0.0, terms);
      WidthProfile h(1.0, 0.0, terms);
      StripDomain dom(l, bind_profile(g, l), bind_profile(h, l));
      NonconvexChain chain = nonconvex_chain(dom, rho);
      CHECK(chain.member);
      CHECK(chain.v0 <= chain.v1 * (1 + 1e-12));
      CHECK(chain.v1 <= chain.v2 * (1 + 1e-12));
      CHECK(chain.v2 == doctest::Approx(kProductLimit).epsilon(1e-14));
    }
  }

  // A strip that is too wide for the class.
  StripDomain wide(1.0, constant_profile(0.0), constant_profile(0.9));
  CHECK_FALSE(nonconvex_chain(wide, 0.5).member);
}
