#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbl/bounds.hpp"
#include "nbl/geometry.hpp"
#include "nbl/solver.hpp"

namespace nbl {

// One case of the three-way certificate for normalized parallelograms
// spanned by (a,b) and (1,0) with a >= 0, b > 0, a^2 + b^2 <= 1:
//   case 1: b  > sqrt(1 - 64/pi^4),        chain v0 = lam_minus * L^2
//   case 2: r  < pi/sqrt(3) - 1,           chain v0 = eta_minus * L^2
//   case 3: a  > 12/pi^2 + 1 - pi/sqrt(3)  and r >= pi/sqrt(3) - 1, eta chain
// where r = sqrt(a^2 + b^2).  v1 is the case's closed-form midpoint and the
// chain asserts v0 <= v1 <= 16 pi^2 (equality only at the square, case 1).
struct CertificateResult {
  int case_id = 0;
  double v0 = 0.0;
  double v1 = 0.0;
  double limit = kProductLimit;
  bool chain_ok = false;
};

CertificateResult certificate_case(double a, double b);

struct SamplerSpec {
  enum class Kind { random, grid };
  Kind kind = Kind::random;
  std::size_t count = 1000;
  std::uint64_t seed = 0x5EED;
  double min_b = 1e-3;  // slivers below this are left to the closed forms
};

// Normalized (a, b) samples.  The grid sampler builds a lattice of about
// `count` points that contains (0, 1) exactly.
std::vector<std::pair<double, double>> sample_parameters(
    const SamplerSpec& spec);

struct StripSamplerSpec {
  std::size_t count = 100;
  std::uint64_t seed = 0x5EED;
  double min_ratio = 1.0;  // l / d
  double max_ratio = 4.0;
  int max_k = 3;
  double min_slope = 0.25;  // target sup|g'| for wavy samples
  double max_slope = 0.8;
  int rect_every = 5;  // every k-th sample is a rectangle
  // When set, samples are members of the A_rho class: d/l <= rho and
  // sup|g'| <= M_rho, with slope targets scaled by M_rho.
  std::optional<double> rho;
};

std::vector<StripDomain> sample_strips(const StripSamplerSpec& spec);

struct OracleSpec {
  int n = 48;         // fine grid; the coarse companion is n/2
  int refine_n = 96;  // re-run resolution for tight margins
  int k = 4;
  double rel_tol = 1e-6;  // slack on oracle-level comparisons
  EigenOptions eigen;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // bound - value
  bool hard = true;     // counted in the violation total
};

struct ScanRecord {
  std::size_t idx = 0;
  bool is_strip = false;
  // Parallelogram parameters; NaN for strips.
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  // l1/l2 double as d/l for strips (phi is NaN there).
  double l1 = 0.0, l2 = 0.0;
  double phi = std::numeric_limits<double>::quiet_NaN();
  double area = 0.0, perim = 0.0;
  double lam_minus = 0.0, lam_plus = 0.0;
  double eta_minus = std::numeric_limits<double>::quiet_NaN();
  double eta_plus = std::numeric_limits<double>::quiet_NaN();
  double mu2 = 0.0, mu3 = 0.0;
  double mu2_err = 0.0, mu3_err = 0.0;
  double prod_perim = 0.0;  // mu2 * L^2
  double prod_area = 0.0;   // mu2 * |Omega|
  int case_id = 0;          // certificate case; 0 for strips
  std::vector<Verdict> verdicts;
  bool refined = false;
  bool failed = false;
  std::string error;

  bool violation() const;  // some hard verdict failed
};

ScanRecord scan_one_parallelogram(std::size_t idx, double a, double b,
                                  const OracleSpec& oracle);
ScanRecord scan_one_strip(std::size_t idx, const StripDomain& d,
                          const OracleSpec& oracle,
                          std::optional<double> rho = std::nullopt);

std::vector<ScanRecord> scan_parallelograms(const SamplerSpec& sampler,
                                            const OracleSpec& oracle,
                                            int threads = 0);
std::vector<ScanRecord> scan_strips(const StripSamplerSpec& sampler,
                                    const OracleSpec& oracle,
                                    int threads = 0);

enum class ShapeClass { square, rectangle_short, rectangle_long, generic };

struct AuditReport {
  ShapeClass shape = ShapeClass::generic;
  ParallelogramBounds bounds;
  double mu2 = 0.0, mu3 = 0.0;
  double mu2_err = 0.0, mu3_err = 0.0;
  double exact_mu2 = std::numeric_limits<double>::quiet_NaN();
  double exact_mu3 = std::numeric_limits<double>::quiet_NaN();
  bool mu2_equality = false;  // |mu2 - lam_minus| <= 3 * indicator
  bool mu3_equality = false;  // |mu3 - lam_plus|  <= 3 * indicator
  bool strict_gap = false;    // min bound - mu2 > 3 * indicator
  bool inconclusive = false;  // gap below resolution; report, don't fail
};

AuditReport equality_audit(const Parallelogram& p, const OracleSpec& oracle);

void write_scan_csv(std::ostream& out, const std::vector<ScanRecord>& records);

struct ScanSummary {
  double max_prod_perim = 0.0;
  std::size_t argmax = 0;
  std::size_t violations = 0;
  std::size_t records = 0;
  std::size_t failures = 0;
};

ScanSummary summarize(const std::vector<ScanRecord>& records);
std::string summary_json(const std::vector<ScanRecord>& records);

}  // namespace nbl
