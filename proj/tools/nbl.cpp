#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nbl/bounds.hpp"
#include "nbl/domain_json.hpp"
#include "nbl/errors.hpp"
#include "nbl/geometry.hpp"
#include "nbl/perturb.hpp"
#include "nbl/solver.hpp"
#include "nbl/verify.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
  std::string subcommand;
  std::vector<double> parallelogram;  // l1 l2 phi
  std::string domain_file;
  bool degrees = false;
  int threads = 0;

  int n = 64;
  int k = 6;

  std::size_t count = 1000;
  std::uint64_t seed = 0x5EED;
  std::string sampler = "random";
  double min_b = 1e-3;
  int oracle_n = 48;
  int refine_n = 96;
  double rel_tol = 1e-6;

  double min_ratio = 1.0;
  double max_ratio = 4.0;
  int max_k = 3;
  int rect_every = 5;
  double min_slope = 0.25;
  double max_slope = 0.8;
  double rho = 0.0;  // 0 = class filter off

  std::string bump = "standard";
  std::vector<double> t_list = {-0.04, -0.02, -0.01, -0.005};

  std::string out;
  std::string summary;
  std::string report;
  std::string dump_matrix;
};

void to_json(json& j, const RunConfig& c) {
  j = json{{"subcommand", c.subcommand},
           {"parallelogram", c.parallelogram},
           {"domain_file", c.domain_file},
           {"degrees", c.degrees},
           {"threads", c.threads},
           {"n", c.n},
           {"k", c.k},
           {"count", c.count},
           {"seed", c.seed},
           {"sampler", c.sampler},
           {"min_b", c.min_b},
           {"oracle_n", c.oracle_n},
           {"refine_n", c.refine_n},
           {"rel_tol", c.rel_tol},
           {"min_ratio", c.min_ratio},
           {"max_ratio", c.max_ratio},
           {"max_k", c.max_k},
           {"rect_every", c.rect_every},
           {"min_slope", c.min_slope},
           {"max_slope", c.max_slope},
           {"rho", c.rho},
           {"bump", c.bump},
           {"t_list", c.t_list},
           {"out", c.out},
           {"summary", c.summary},
           {"report", c.report},
           {"dump_matrix", c.dump_matrix}};
}

void from_json(const json& j, RunConfig& c) {
  RunConfig defaults;
  c.subcommand = j.value("subcommand", defaults.subcommand);
  c.parallelogram = j.value("parallelogram", defaults.parallelogram);
  c.domain_file = j.value("domain_file", defaults.domain_file);
  c.degrees = j.value("degrees", defaults.degrees);
  c.threads = j.value("threads", defaults.threads);
  c.n = j.value("n", defaults.n);
  c.k = j.value("k", defaults.k);
  c.count = j.value("count", defaults.count);
  c.seed = j.value("seed", defaults.seed);
  c.sampler = j.value("sampler", defaults.sampler);
  c.min_b = j.value("min_b", defaults.min_b);
  c.oracle_n = j.value("oracle_n", defaults.oracle_n);
  c.refine_n = j.value("refine_n", defaults.refine_n);
  c.rel_tol = j.value("rel_tol", defaults.rel_tol);
  c.min_ratio = j.value("min_ratio", defaults.min_ratio);
  c.max_ratio = j.value("max_ratio", defaults.max_ratio);
  c.max_k = j.value("max_k", defaults.max_k);
  c.rect_every = j.value("rect_every", defaults.rect_every);
  c.min_slope = j.value("min_slope", defaults.min_slope);
  c.max_slope = j.value("max_slope", defaults.max_slope);
  c.rho = j.value("rho", defaults.rho);
  c.bump = j.value("bump", defaults.bump);
  c.t_list = j.value("t_list", defaults.t_list);
  c.out = j.value("out", defaults.out);
  c.summary = j.value("summary", defaults.summary);
  c.report = j.value("report", defaults.report);
  c.dump_matrix = j.value("dump_matrix", defaults.dump_matrix);
}

nbl::Domain load_domain(const RunConfig& c) {
  if (!c.parallelogram.empty()) {
    if (c.parallelogram.size() != 3) {
      throw nbl::DegenerateDomain("--parallelogram expects l1 l2 phi");
    }
    double phi = c.parallelogram[2];
    if (c.degrees) phi *= std::numbers::pi / 180.0;
    return nbl::Parallelogram(c.parallelogram[0], c.parallelogram[1], phi);
  }
  if (c.domain_file.empty()) {
    throw nbl::DegenerateDomain(
        "no domain given: use --parallelogram or --domain/--strip FILE");
  }
  std::ifstream in(c.domain_file);
  if (!in) {
    throw nbl::DegenerateDomain("cannot open domain file " + c.domain_file);
  }
  json j;
  in >> j;
  return nbl::domain_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

json bounds_json(const nbl::Domain& dom) {
  if (const auto* p = std::get_if<nbl::Parallelogram>(&dom)) {
    nbl::ParallelogramBounds b = nbl::parallelogram_bounds(*p);
    return json{{"type", "parallelogram"},
                {"l1", p->l1()},
                {"l2", p->l2()},
                {"phi", p->phi()},
                {"area", p->area()},
                {"perimeter", p->perimeter()},
                {"lambda_minus", b.lam_minus},
                {"lambda_plus", b.lam_plus},
                {"eta_minus", b.eta_minus},
                {"eta_plus", b.eta_plus},
                {"mu2_bound", b.mu2_bound},
                {"mu3_bound", b.mu3_bound},
                {"mean", b.mean},
                {"mu2_tight", b.mu2_tight},
                {"mu3_tight", b.mu3_tight}};
  }
  const auto& s = std::get<nbl::StripDomain>(dom);
  nbl::StripBounds b = nbl::strip_bounds(s);
  return json{{"type", "strip"},
              {"l", b.length},
              {"d", b.width},
              {"i1", b.i1},
              {"i2", b.i2},
              {"lambda_minus", b.lam_minus},
              {"lambda_plus", b.lam_plus},
              {"mu2_simple", b.mu2_simple},
              {"mu2_bound", b.mu2_bound},
              {"mu3_bound", b.mu3_bound},
              {"mean", b.mean},
              {"area", s.area()},
              {"perimeter", s.perimeter()}};
}

int cmd_bounds(const RunConfig& c) {
  write_text(c.out, bounds_json(load_domain(c)).dump(2));
  return 0;
}

int cmd_solve(const RunConfig& c) {
  nbl::Domain dom = load_domain(c);
  nbl::EigenOptions eopts;
  int coarse_n = std::max(2, c.n / 2);
  nbl::EigenResult coarse = nbl::solve_domain(dom, coarse_n, c.k, eopts);
  nbl::EigenResult fine = nbl::solve_domain(dom, c.n, c.k, eopts);
  json j;
  j["domain"] = nbl::domain_to_json(dom);
  j["n"] = c.n;
  j["k"] = c.k;
  j["eigenvalues"] = fine.eigenvalues;
  j["residuals"] = fine.residuals;
  j["coarse_n"] = coarse_n;
  j["coarse_eigenvalues"] = coarse.eigenvalues;
  std::vector<double> est, ind;
  for (std::size_t i = 0; i < fine.eigenvalues.size(); ++i) {
    nbl::Extrapolated e =
        nbl::extrapolate(coarse.eigenvalues[i], fine.eigenvalues[i]);
    est.push_back(e.estimate);
    ind.push_back(e.error_indicator);
  }
  j["extrapolated"] = est;
  j["error_indicators"] = ind;
  write_text(c.out, j.dump(2));

  if (!c.dump_matrix.empty()) {
    nbl::FormCoefficients fc = std::visit(
        [](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, nbl::Parallelogram>) {
            return nbl::parallelogram_form(d);
          } else {
            return nbl::strip_form(d);
          }
        },
        dom);
    nbl::AssembledSystem sys = nbl::assemble(fc, nbl::Grid{c.n});
    std::ofstream ks(c.dump_matrix + "_k.txt");
    std::ofstream ms(c.dump_matrix + "_m.txt");
    if (!ks || !ms) throw std::runtime_error("cannot open matrix dump files");
    nbl::dump_matrix(sys.stiffness, ks);
    nbl::dump_matrix(sys.mass, ms);
  }
  return 0;
}

int scan_exit_code(const std::vector<nbl::ScanRecord>& records) {
  nbl::ScanSummary s = nbl::summarize(records);
  if (s.violations > 0) return 4;
  if (s.failures > 0) return 3;
  return 0;
}

nbl::OracleSpec oracle_from(const RunConfig& c) {
  nbl::OracleSpec spec;
  spec.n = c.oracle_n;
  spec.refine_n = c.refine_n;
  spec.rel_tol = c.rel_tol;
  return spec;
}

int cmd_scan(const RunConfig& c) {
  nbl::SamplerSpec sampler;
  sampler.kind = c.sampler == "grid" ? nbl::SamplerSpec::Kind::grid
                                     : nbl::SamplerSpec::Kind::random;
  sampler.count = c.count;
  sampler.seed = c.seed;
  sampler.min_b = c.min_b;
  auto records = nbl::scan_parallelograms(sampler, oracle_from(c), c.threads);
  std::ostringstream csv;
  nbl::write_scan_csv(csv, records);
  write_text(c.out, csv.str());
  write_text(c.summary, nbl::summary_json(records));
  return scan_exit_code(records);
}

int cmd_strip_scan(const RunConfig& c) {
  nbl::StripSamplerSpec sampler;
  sampler.count = c.count;
  sampler.seed = c.seed;
  sampler.min_ratio = c.min_ratio;
  sampler.max_ratio = c.max_ratio;
  sampler.max_k = c.max_k;
  sampler.rect_every = c.rect_every;
  sampler.min_slope = c.min_slope;
  sampler.max_slope = c.max_slope;
  if (c.rho > 0.0) sampler.rho = c.rho;
  auto records = nbl::scan_strips(sampler, oracle_from(c), c.threads);
  std::ostringstream csv;
  nbl::write_scan_csv(csv, records);
  write_text(c.out, csv.str());
  write_text(c.summary, nbl::summary_json(records));
  return scan_exit_code(records);
}

int cmd_perturb(const RunConfig& c) {
  nbl::BumpProfile bump = [&] {
    if (c.bump == "standard") return nbl::standard_bump();
    if (c.bump == "sine_squared") return nbl::sine_squared_bump();
    if (c.bump == "zero") return nbl::zero_bump();
    throw nbl::DegenerateDomain(
        "bump must be standard, sine_squared, or zero");
  }();
  nbl::PerturbOptions opts;
  opts.n = c.oracle_n;
  opts.threads = c.threads;
  nbl::PerturbationReport rep = nbl::derivative_check(bump, c.t_list, opts);
  std::ostringstream csv;
  nbl::write_perturb_csv(csv, rep);
  write_text(c.out, csv.str());
  write_text(c.report, nbl::perturb_report_json(rep));
  return 0;
}

int cmd_audit(const RunConfig& c) {
  nbl::Domain dom = load_domain(c);
  const auto* p = std::get_if<nbl::Parallelogram>(&dom);
  if (!p) throw nbl::DegenerateDomain("audit expects a parallelogram");
  nbl::AuditReport rep = nbl::equality_audit(*p, oracle_from(c));
  const char* shapes[] = {"square", "rectangle_short", "rectangle_long",
                          "generic"};
  json j;
  j["shape"] = shapes[static_cast<int>(rep.shape)];
  j["lambda_minus"] = rep.bounds.lam_minus;
  j["lambda_plus"] = rep.bounds.lam_plus;
  j["eta_minus"] = rep.bounds.eta_minus;
  j["eta_plus"] = rep.bounds.eta_plus;
  j["mu2"] = rep.mu2;
  j["mu3"] = rep.mu3;
  j["mu2_err"] = rep.mu2_err;
  j["mu3_err"] = rep.mu3_err;
  j["exact_mu2"] = rep.exact_mu2;
  j["exact_mu3"] = rep.exact_mu3;
  j["mu2_equality"] = rep.mu2_equality;
  j["mu3_equality"] = rep.mu3_equality;
  j["strict_gap"] = rep.strict_gap;
  j["inconclusive"] = rep.inconclusive;
  write_text(c.out, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // Seed from --config before CLI parsing so flags override file values.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        std::cerr << "cannot open config file " << argv[i + 1] << "\n";
        return 2;
      }
      try {
        json j;
        in >> j;
        cfg = j.get<RunConfig>();
      } catch (const std::exception& e) {
        std::cerr << "bad config: " << e.what() << "\n";
        return 2;
      }
    }
  }

  CLI::App app{"Neumann eigenvalue bounds for parallelograms and strips"};
  app.require_subcommand(0, 1);
  std::string config_file;
  bool dump_config = false;
  app.add_option("--config", config_file, "load a run configuration (JSON)");
  app.add_flag("--dump-config", dump_config,
               "print the effective configuration and exit");
  app.add_option("--threads", cfg.threads,
                 "worker cap (falls back to NBL_THREADS, then cores)");
  app.add_flag("--degrees", cfg.degrees, "interpret angles in degrees");

  auto add_domain_opts = [&](CLI::App* sub) {
    sub->add_option("--parallelogram", cfg.parallelogram,
                    "side lengths and angle: l1 l2 phi")
        ->expected(3);
    sub->add_option("--domain", cfg.domain_file, "domain JSON file");
    sub->add_option("--strip", cfg.domain_file, "strip JSON file");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
  };

  CLI::App* bounds = app.add_subcommand("bounds", "closed-form bounds");
  add_domain_opts(bounds);

  CLI::App* solve = app.add_subcommand("solve", "finite element oracle");
  add_domain_opts(solve);
  solve->add_option("-n,--n", cfg.n, "grid resolution");
  solve->add_option("-k,--k", cfg.k, "eigenpair count");
  solve->add_option("--dump-matrix", cfg.dump_matrix,
                    "write PREFIX_k.txt / PREFIX_m.txt coordinate dumps");

  auto add_scan_opts = [&](CLI::App* sub) {
    sub->add_option("--count", cfg.count, "sample count");
    sub->add_option("--seed", cfg.seed, "sampler seed");
    sub->add_option("-n,--oracle-n", cfg.oracle_n, "oracle grid");
    sub->add_option("--refine-n", cfg.refine_n, "tight-margin re-run grid");
    sub->add_option("--rel-tol", cfg.rel_tol, "oracle comparison slack");
    sub->add_option("--out", cfg.out, "CSV output file (default stdout)");
    sub->add_option("--summary", cfg.summary,
                    "summary JSON file (default stdout)");
  };

  CLI::App* scan = app.add_subcommand("scan", "parallelogram family scan");
  add_scan_opts(scan);
  scan->add_option("--sampler", cfg.sampler, "random or grid");
  scan->add_option("--min-b", cfg.min_b, "sliver exclusion threshold");

  CLI::App* sscan = app.add_subcommand("strip-scan", "strip family scan");
  add_scan_opts(sscan);
  sscan->add_option("--min-ratio", cfg.min_ratio, "min l/d");
  sscan->add_option("--max-ratio", cfg.max_ratio, "max l/d");
  sscan->add_option("--max-k", cfg.max_k, "max trig frequency");
  sscan->add_option("--rect-every", cfg.rect_every,
                    "every k-th sample is a rectangle");
  sscan->add_option("--min-slope", cfg.min_slope, "min slope target");
  sscan->add_option("--max-slope", cfg.max_slope, "max slope target");
  sscan->add_option("--rho", cfg.rho, "sample the d/l <= rho class");

  CLI::App* perturb = app.add_subcommand("perturb", "boundary bump study");
  perturb->add_option("--bump", cfg.bump, "standard, sine_squared, or zero");
  perturb->add_option("--t", cfg.t_list, "deformation magnitudes");
  perturb->add_option("-n,--oracle-n", cfg.oracle_n, "oracle grid");
  perturb->add_option("--out", cfg.out, "CSV output (default stdout)");
  perturb->add_option("--report", cfg.report, "JSON report (default stdout)");

  CLI::App* audit = app.add_subcommand("audit", "equality-case audit");
  add_domain_opts(audit);
  audit->add_option("-n,--oracle-n", cfg.oracle_n, "oracle grid");
  audit->add_option("--refine-n", cfg.refine_n, "refine grid");

  // Let global flags (--degrees, --dump-config, ...) appear after the
  // subcommand name.
  for (CLI::App* sub : {bounds, solve, scan, sscan, perturb, audit}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (bounds->parsed()) cfg.subcommand = "bounds";
  if (solve->parsed()) cfg.subcommand = "solve";
  if (scan->parsed()) cfg.subcommand = "scan";
  if (sscan->parsed()) cfg.subcommand = "strip-scan";
  if (perturb->parsed()) cfg.subcommand = "perturb";
  if (audit->parsed()) cfg.subcommand = "audit";

  if (dump_config) {
    json j = cfg;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (cfg.subcommand.empty()) {
    std::cerr << "no subcommand given (see --help)\n";
    return 2;
  }
  try {
    if (cfg.subcommand == "bounds") return cmd_bounds(cfg);
    if (cfg.subcommand == "solve") return cmd_solve(cfg);
    if (cfg.subcommand == "scan") return cmd_scan(cfg);
    if (cfg.subcommand == "strip-scan") return cmd_strip_scan(cfg);
    if (cfg.subcommand == "perturb") return cmd_perturb(cfg);
    if (cfg.subcommand == "audit") return cmd_audit(cfg);
    std::cerr << "unknown subcommand " << cfg.subcommand << "\n";
    return 2;
  } catch (const nbl::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const nbl::NotSPD& e) {
    std::cerr << "coefficients not positive definite: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
