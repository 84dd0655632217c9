#include "nbl/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "nbl/bounds.hpp"
#include "nbl/parallel.hpp"
#include "nbl/quadrature.hpp"

namespace nbl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
constexpr int kCheckGrid = 4096;

double bump_integral(const std::function<double(double)>& f) {
  return quad::integrate_adaptive(f, 0.0, 1.0, 0.0, 1e-12);
}

}  // namespace

BumpProfile::BumpProfile(std::function<double(double)> value,
                         std::function<double(double)> derivative,
                         bool restricted_support, std::string name)
    : value_(std::move(value)),
      derivative_(std::move(derivative)),
      restricted_(restricted_support),
      name_(std::move(name)) {
  if (!value_ || !derivative_) {
    throw DegenerateDomain("bump profile needs value and derivative");
  }
  double peak = 0.0;
  for (int i = 0; i <= kCheckGrid; ++i) {
    double x = static_cast<double>(i) / kCheckGrid;
    double v = value_(x);
    double w = value_(1.0 - x);
    if (v < -1e-15) throw DegenerateDomain("bump must be nonnegative");
    if (std::abs(v - w) > 1e-12 * std::max(1.0, std::abs(v))) {
      throw DegenerateDomain("bump must be symmetric about 1/2");
    }
    peak = std::max(peak, v);
    bool outside = restricted_ ? (x >= 0.25 && x <= 0.75)
                               : (x == 0.0 || x == 1.0);
    if (outside && std::abs(v) >= 1e-14) {
      throw DegenerateDomain("bump must vanish outside its support");
    }
  }
  max_value_ = peak;
}

BumpProfile standard_bump() {
  // integral of x^2 (1/4 - x)^2 over (0, 1/4) is (1/4)^5 / 30; two copies
  // of the quartic make the normalizing constant 15360.
  auto value = [](double x) {
    if (x > 0.0 && x < 0.25) {
      double p = x * (0.25 - x);
      return 15360.0 * p * p;
    }
    if (x > 0.75 && x < 1.0) {
      double p = (1.0 - x) * (x - 0.75);
      return 15360.0 * p * p;
    }
    return 0.0;
  };
  auto derivative = [](double x) {
    if (x > 0.0 && x < 0.25) {
      double p = x * (0.25 - x);
      return 15360.0 * 2.0 * p * (0.25 - 2.0 * x);
    }
    if (x > 0.75 && x < 1.0) {
      double p = (1.0 - x) * (x - 0.75);
      return 15360.0 * 2.0 * p * (1.75 - 2.0 * x);
    }
    return 0.0;
  };
  return BumpProfile(value, derivative, true, "standard");
}

BumpProfile sine_squared_bump() {
  auto value = [](double x) {
    double s = std::sin(kPi * x);
    return s * s;
  };
  auto derivative = [](double x) { return kPi * std::sin(2.0 * kPi * x); };
  return BumpProfile(value, derivative, false, "sine_squared");
}

BumpProfile zero_bump() {
  return BumpProfile([](double) { return 0.0; }, [](double) { return 0.0; },
                     true, "zero");
}

HadamardMatrix hadamard_matrix(const BumpProfile& f) {
  // Reduced form under the symmetry hypotheses.
  double int_f = bump_integral([&f](double x) { return f.value(x); });
  double int_c2f = bump_integral(
      [&f](double x) { return std::cos(2.0 * kPi * x) * f.value(x); });
  HadamardMatrix m;
  m.m11 = -2.0 * kPi2 * int_c2f;
  m.m22 = -2.0 * kPi2 * int_f;
  m.m12 = 0.0;
  m.alpha1 = -m.m11;
  m.alpha2 = -m.m22;

  // Full boundary integrals with u1 = sqrt(2) cos(pi x),
  // u2 = sqrt(2) cos(pi y), mu = pi^2, evaluated on the bottom edge.
  auto entry = [&f](auto integrand) {
    return bump_integral([&f, integrand](double x) {
      return integrand(x) * f.value(x);
    });
  };
  double g11 = entry([](double x) {
    double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    return 2.0 * kPi2 * sx * sx - kPi2 * 2.0 * cx * cx;
  });
  double g12 = entry([](double x) { return -2.0 * kPi2 * std::cos(kPi * x); });
  double g22 = entry([](double) { return -2.0 * kPi2; });
  if (std::abs(g11 - m.m11) > 1e-10 || std::abs(g22 - m.m22) > 1e-10 ||
      std::abs(g12 - m.m12) > 1e-10) {
    throw std::logic_error(
        "boundary-integral entries disagree with the reduced form");
  }
  return m;
}

StripDomain deformed_domain(double t, const BumpProfile& f) {
  if (std::abs(t) * f.max_value() >= 0.5) {
    throw DegenerateDomain("deformation too large for a valid strip");
  }
  Profile lower;
  lower.value = [t, f](double x) { return -t * f.value(x); };
  lower.derivative = [t, f](double x) { return -t * f.derivative(x); };
  return StripDomain(1.0, std::move(lower), constant_profile(1.0));
}

namespace {

BranchSample solve_sample(double t, const BumpProfile& f,
                          const PerturbOptions& opts) {
  BranchSample s;
  s.t = t;
  StripDomain dom = deformed_domain(t, f);
  s.l = dom.perimeter();
  Domain d{dom};
  EigenResult coarse = solve_domain(d, opts.n / 2, opts.k, opts.eigen);
  EigenResult fine = solve_domain(d, opts.n, opts.k, opts.eigen);
  Extrapolated e2 = extrapolate(coarse.eigenvalues[1], fine.eigenvalues[1]);
  Extrapolated e3 = extrapolate(coarse.eigenvalues[2], fine.eigenvalues[2]);
  s.mu2 = e2.estimate;
  s.mu3 = e3.estimate;
  s.mu2_err = e2.error_indicator;
  s.mu3_err = e3.error_indicator;
  s.f_value = s.mu2 * s.l * s.l;
  s.branch_ambiguity =
      std::abs(s.mu3 - s.mu2) < 10.0 * (s.mu2_err + s.mu3_err);
  return s;
}

void validate_t_list(const std::vector<double>& t_list) {
  if (t_list.size() < 4) {
    throw std::invalid_argument("t_list needs at least 4 entries");
  }
  std::vector<double> mags;
  for (double t : t_list) {
    if (t == 0.0 || std::abs(t) > 0.1) {
      throw std::invalid_argument("t values must lie in [-0.1, 0.1] \\ {0}");
    }
    mags.push_back(std::abs(t));
  }
  std::sort(mags.begin(), mags.end());
  mags.erase(std::unique(mags.begin(), mags.end(),
                         [](double x, double y) {
                           return std::abs(x - y) <= 1e-12 * y;
                         }),
             mags.end());
  if (mags.size() < 4) {
    throw std::invalid_argument("t_list needs at least 4 magnitudes");
  }
  double ratio = mags[1] / mags[0];
  for (std::size_t i = 1; i + 1 < mags.size(); ++i) {
    double r = mags[i + 1] / mags[i];
    if (std::abs(r - ratio) > 1e-6 * ratio) {
      throw std::invalid_argument(
          "t magnitudes must form a geometric progression");
    }
  }
}

}  // namespace

PerturbationReport derivative_check(const BumpProfile& f,
                                    const std::vector<double>& t_list,
                                    const PerturbOptions& opts) {
  validate_t_list(t_list);
  PerturbationReport rep;
  rep.m = hadamard_matrix(f);
  rep.predicted_slope_lo = -rep.m.alpha2;
  rep.predicted_slope_hi = -rep.m.alpha1;

  rep.reference = solve_sample(0.0, f, opts);
  rep.samples.resize(t_list.size());
  parallel_for(t_list.size(), opts.threads, [&](std::size_t i) {
    rep.samples[i] = solve_sample(t_list[i], f, opts);
  });

  // One-sided slopes from the two smallest negative magnitudes, Richardson
  // extrapolated to kill the O(t) term of the difference quotient.
  std::vector<const BranchSample*> neg;
  for (const auto& s : rep.samples) {
    if (s.t < 0.0) neg.push_back(&s);
  }
  std::sort(neg.begin(), neg.end(), [](const auto* x, const auto* y) {
    return std::abs(x->t) < std::abs(y->t);
  });
  if (neg.size() >= 2) {
    const BranchSample& s1 = *neg[0];
    const BranchSample& s2 = *neg[1];
    double rho = s2.t / s1.t;
    auto one_sided = [&](double v1, double v2, double v0) {
      double d1 = (v1 - v0) / s1.t;
      double d2 = (v2 - v0) / s2.t;
      return (rho * d1 - d2) / (rho - 1.0);
    };
    rep.fd_slope_mu2 = one_sided(s1.mu2, s2.mu2, rep.reference.mu2);
    rep.fd_slope_mu3 = one_sided(s1.mu3, s2.mu3, rep.reference.mu3);
  }

  double t_star = 0.0;
  for (const auto* s : neg) {
    if (s->f_value > kProductLimit) {
      t_star = s->t;
    } else {
      break;
    }
  }
  rep.t_star = t_star;

  // Least-squares exponent of |L(t) - 4| against |t|.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& s : rep.samples) {
    double dl = std::abs(s.l - 4.0);
    if (dl < 1e-14) continue;
    double x = std::log(std::abs(s.t)), y = std::log(dl);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) {
    rep.l_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }
  return rep;
}

void write_perturb_csv(std::ostream& out, const PerturbationReport& rep) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "t,L,mu2,mu3,F,mu2_err\n";
  for (const auto& s : rep.samples) {
    out << fmt(s.t) << ',' << fmt(s.l) << ',' << fmt(s.mu2) << ','
        << fmt(s.mu3) << ',' << fmt(s.f_value) << ',' << fmt(s.mu2_err)
        << '\n';
  }
}

std::string perturb_report_json(const PerturbationReport& rep) {
  nlohmann::json j;
  j["matrix"] = {{"m11", rep.m.m11}, {"m12", rep.m.m12}, {"m22", rep.m.m22}};
  j["alpha1"] = rep.m.alpha1;
  j["alpha2"] = rep.m.alpha2;
  j["fd_slope_mu2"] = rep.fd_slope_mu2;
  j["fd_slope_mu3"] = rep.fd_slope_mu3;
  j["predicted_slopes"] = {rep.predicted_slope_lo, rep.predicted_slope_hi};
  j["t_star"] = rep.t_star;
  j["l_exponent"] = rep.l_exponent;
  j["reference_mu2"] = rep.reference.mu2;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : rep.samples) {
    rows.push_back({{"t", s.t},
                    {"L", s.l},
                    {"mu2", s.mu2},
                    {"mu3", s.mu3},
                    {"F", s.f_value},
                    {"mu2_err", s.mu2_err},
                    {"branch_ambiguity", s.branch_ambiguity}});
  }
  j["samples"] = rows;
  return j.dump(2);
}

}  // namespace nbl
