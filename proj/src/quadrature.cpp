#include "nbl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nbl::quad {
namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

Rule build_rule(int order) {
  Rule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(order, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One polishing step after convergence.
        auto [p2, dp2] = legendre(order, x);
        x -= p2 / dp2;
        break;
      }
    }
    auto [p, dp] = legendre(order, x);
    (void)p;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[order - 1 - i] = x;
    r.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) {
    auto [p, dp] = legendre(order, 0.0);
    (void)p;
    r.nodes[order / 2] = 0.0;
    r.weights[order / 2] = 2.0 / (dp * dp);
  }
  return r;
}

// Gauss-Kronrod (7, 15) constants, positive half of the node set.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;
  double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double x = h * kXgk[i];
    double fs = f(c - x) + f(c + x);
    kron += kWgk[i] * fs;
    if (i % 2 == 1) gauss += kWg[i / 2] * fs;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

}  // namespace

const Rule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int order, int panels) {
  if (panels < 1) throw std::invalid_argument("panels must be >= 1");
  const Rule& r = gauss_legendre(order);
  double total = 0.0;
  double pw = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double pa = a + p * pw;
    double c = pa + 0.5 * pw;
    double h = 0.5 * pw;
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += r.weights[i] * f(c + h * r.nodes[i]);
    total += acc * h;
  }
  return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double abs_tol) {
  struct Seg {
    double a, b, value, err;
  };
  auto first = gk15(f, a, b);
  std::vector<Seg> segs{{a, b, first.kronrod, first.err}};
  double span = std::abs(b - a);
  for (;;) {
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) {
      total += s.value;
      err += s.err;
    }
    double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (err <= tol || segs.size() >= 4000) return total;
    auto worst = std::max_element(
        segs.begin(), segs.end(),
        [](const Seg& x, const Seg& y) { return x.err < y.err; });
    if (std::abs(worst->b - worst->a) <
        span * std::numeric_limits<double>::epsilon()) {
      return total;  // machine-limited; the estimate is pessimistic here
    }
    double mid = 0.5 * (worst->a + worst->b);
    auto left = gk15(f, worst->a, mid);
    auto right = gk15(f, mid, worst->b);
    Seg r{mid, worst->b, right.kronrod, right.err};
    *worst = {worst->a, mid, left.kronrod, left.err};
    segs.push_back(r);
  }
}

}  // namespace nbl::quad
