#include "nbl/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include "nbl/quadrature.hpp"

namespace nbl {
namespace {

struct QuadPoint {
  double xi, eta, w;
  std::array<double, 4> shape;
  std::array<double, 4> gx, gy;  // reference-cell gradients
};

// Bilinear basis on the reference cell [0,1]^2; local node a = 2*aj + ai.
std::vector<QuadPoint> tensor_points(int order) {
  const quad::Rule& gl = quad::gauss_legendre(order);
  std::vector<QuadPoint> pts;
  pts.reserve(order * order);
  for (int b = 0; b < order; ++b) {
    for (int a = 0; a < order; ++a) {
      QuadPoint p;
      p.xi = 0.5 * (gl.nodes[a] + 1.0);
      p.eta = 0.5 * (gl.nodes[b] + 1.0);
      p.w = 0.25 * gl.weights[a] * gl.weights[b];
      double xi = p.xi, eta = p.eta;
      p.shape = {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta,
                 xi * eta};
      p.gx = {-(1 - eta), (1 - eta), -eta, eta};
      p.gy = {-(1 - xi), -xi, (1 - xi), xi};
      pts.push_back(p);
    }
  }
  return pts;
}

using Local = std::array<std::array<double, 4>, 4>;

// Element matrices at cell origin (s0, t0).  Reference gradients carry a
// 1/h factor that cancels against the h^2 area element in the stiffness.
void element_matrices(const FormCoefficients& fc,
                      const std::vector<QuadPoint>& pts, double s0, double t0,
                      double h, Local& ke, Local& me) {
  for (auto& row : ke) row.fill(0.0);
  for (auto& row : me) row.fill(0.0);
  for (const auto& p : pts) {
    SymMat2 A = fc.matrix(s0 + p.xi * h, t0 + p.eta * h);
    double w = fc.weight(s0 + p.xi * h, t0 + p.eta * h);
    double wm = p.w * w * h * h;
    for (int a = 0; a < 4; ++a) {
      double ax = A.a11 * p.gx[a] + A.a12 * p.gy[a];
      double ay = A.a12 * p.gx[a] + A.a22 * p.gy[a];
      for (int b = a; b < 4; ++b) {
        ke[a][b] += p.w * (ax * p.gx[b] + ay * p.gy[b]);
        me[a][b] += wm * p.shape[a] * p.shape[b];
      }
    }
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < a; ++b) {
      ke[a][b] = ke[b][a];
      me[a][b] = me[b][a];
    }
  }
}

}  // namespace

AssembledSystem assemble(const FormCoefficients& fc, Grid grid) {
  if (grid.n < 2) throw std::invalid_argument("grid needs n >= 2");
  if (!fc.matrix || !fc.weight) {
    throw std::invalid_argument("form coefficients not populated");
  }
  const int n = grid.n;
  const int np = n + 1;
  const int N = grid.node_count();
  const double h = grid.h();
  const auto pts = tensor_points(fc.is_constant ? 2 : 3);

  // Per-node 9-point stencils; symmetric pairs accumulate the same addends
  // in the same element order, which keeps K and M bitwise symmetric.
  std::vector<std::array<double, 9>> kst(N), mst(N);
  for (int i = 0; i < N; ++i) {
    kst[i].fill(0.0);
    mst[i].fill(0.0);
  }

  Local ke, me;
  if (fc.is_constant) element_matrices(fc, pts, 0.0, 0.0, h, ke, me);
  for (int ej = 0; ej < n; ++ej) {
    for (int ei = 0; ei < n; ++ei) {
      if (!fc.is_constant) {
        element_matrices(fc, pts, ei * h, ej * h, h, ke, me);
      }
      for (int a = 0; a < 4; ++a) {
        int ai = a & 1, aj = a >> 1;
        int g = grid.node_index(ei + ai, ej + aj);
        for (int b = 0; b < 4; ++b) {
          int off = ((b & 1) - ai + 1) + 3 * ((b >> 1) - aj + 1);
          kst[g][off] += ke[a][b];
          mst[g][off] += me[a][b];
        }
      }
    }
  }

  AssembledSystem sys;
  sys.grid = grid;
  sys.stiffness.resize(N, N);
  sys.mass.resize(N, N);
  sys.stiffness.reserve(Eigen::VectorXi::Constant(N, 9));
  sys.mass.reserve(Eigen::VectorXi::Constant(N, 9));
  for (int p = 0; p < N; ++p) {
    int i = p % np, j = p / np;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        int i2 = i + di, j2 = j + dj;
        if (i2 < 0 || i2 > n || j2 < 0 || j2 > n) continue;
        int r = grid.node_index(i2, j2);
        int off = (di + 1) + 3 * (dj + 1);
        sys.stiffness.insert(r, p) = kst[p][off];
        sys.mass.insert(r, p) = mst[p][off];
      }
    }
  }
  sys.stiffness.makeCompressed();
  sys.mass.makeCompressed();
  return sys;
}

namespace {

std::vector<double> explicit_residuals(const SparseMat& K, const SparseMat& M,
                                       const std::vector<double>& mu,
                                       const Eigen::MatrixXd& X) {
  std::vector<double> res(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Eigen::VectorXd x = X.col(static_cast<int>(i));
    res[i] = (K * x - mu[i] * (M * x)).norm() / x.norm();
  }
  return res;
}

EigenResult dense_solve(const AssembledSystem& sys, int k) {
  Eigen::MatrixXd Kd(sys.stiffness), Md(sys.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      Kd, Md, Eigen::Ax_lBx | Eigen::ComputeEigenvectors);
  if (ges.info() != Eigen::Success) {
    throw SolverFailure("dense generalized eigensolve failed");
  }
  EigenResult out;
  out.n = sys.grid.n;
  out.eigenvalues.assign(ges.eigenvalues().data(),
                         ges.eigenvalues().data() + k);
  out.eigenvectors = ges.eigenvectors().leftCols(k);
  out.residuals =
      explicit_residuals(sys.stiffness, sys.mass, out.eigenvalues,
                         out.eigenvectors);
  return out;
}

struct LanczosOutcome {
  bool converged = false;
  EigenResult result;
};

LanczosOutcome lanczos_solve(const AssembledSystem& sys, int k,
                             const EigenOptions& opts, double sigma,
                             const Eigen::SimplicialLLT<SparseMat>& llt) {
  const SparseMat& K = sys.stiffness;
  const SparseMat& M = sys.mass;
  const int N = static_cast<int>(K.rows());
  const int maxm = std::min(opts.max_lanczos_dim, N);

  Eigen::MatrixXd V(N, maxm);   // M-orthonormal Lanczos basis
  Eigen::MatrixXd MV(N, maxm);  // cached M * V for reorthogonalization
  Eigen::VectorXd alpha(maxm), beta(maxm);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(N);
  for (int i = 0; i < N; ++i) v[i] = unif(rng);
  Eigen::VectorXd Mv = M * v;
  v /= std::sqrt(v.dot(Mv));
  V.col(0) = v;
  MV.col(0) = M * v;

  int m = 0;
  int next_check = std::max(2 * k + 8, 24);
  LanczosOutcome out;
  for (int j = 0; j < maxm; ++j) {
    Eigen::VectorXd w = llt.solve(MV.col(j));
    if (j > 0) w -= beta[j - 1] * V.col(j - 1);
    alpha[j] = V.col(j).dot(M * w);
    w -= alpha[j] * V.col(j);
    // Two-pass classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd coeff =
          MV.leftCols(j + 1).transpose() * w;  // (M v_i)^T w
      w -= V.leftCols(j + 1) * coeff;
    }
    double b2 = w.dot(M * w);
    beta[j] = b2 > 0.0 ? std::sqrt(b2) : 0.0;
    m = j + 1;
    bool breakdown = !(beta[j] > 1e-14);
    if (!breakdown && j + 1 < maxm) {
      V.col(j + 1) = w / beta[j];
      MV.col(j + 1) = M * V.col(j + 1);
    }

    bool last = breakdown || j + 1 == maxm;
    if (m < std::max(k + 2, 3) && !last) continue;
    if (m < next_check && !last) continue;
    next_check = m + 16;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tev;
    tev.computeFromTridiagonal(alpha.head(m), beta.head(m - 1),
                               Eigen::ComputeEigenvectors);
    if (tev.info() != Eigen::Success) break;
    int avail = std::min(k, m);
    EigenResult cand;
    cand.n = sys.grid.n;
    cand.eigenvalues.resize(avail);
    cand.eigenvectors.resize(N, avail);
    for (int i = 0; i < avail; ++i) {
      double theta = tev.eigenvalues()[m - 1 - i];  // descending theta
      cand.eigenvalues[i] = sigma + 1.0 / theta;
      cand.eigenvectors.col(i) =
          V.leftCols(m) * tev.eigenvectors().col(m - 1 - i);
    }
    cand.residuals = explicit_residuals(K, M, cand.eigenvalues,
                                        cand.eigenvectors);
    bool ok = avail == k;
    for (double r : cand.residuals) ok = ok && r <= opts.residual_tol;
    if (ok) {
      // Guard against convergence to a reordered set: musts be ascending.
      for (int i = 1; i < avail; ++i) {
        ok = ok && cand.eigenvalues[i] >= cand.eigenvalues[i - 1] - 1e-12;
      }
    }
    if (ok) {
      out.converged = true;
      out.result = std::move(cand);
      return out;
    }
    if (last) {
      out.result = std::move(cand);
      break;
    }
  }
  return out;
}

}  // namespace

EigenResult lowest_eigenpairs(const AssembledSystem& sys, int k,
                              const EigenOptions& opts) {
  const int N = static_cast<int>(sys.stiffness.rows());
  if (k < 1 || k > 10) throw std::invalid_argument("k must be in [1, 10]");
  if (k > N) throw std::invalid_argument("k exceeds problem size");
  if (N <= opts.dense_dof_limit) return dense_solve(sys, k);

  double sigma = opts.shift;
  for (int attempt = 0; attempt < 3; ++attempt) {
    SparseMat C = sys.stiffness - sigma * sys.mass;
    Eigen::SimplicialLLT<SparseMat> llt;
    llt.compute(C);
    if (llt.info() != Eigen::Success) {
      sigma *= 1e4;  // retreat further into the definite region
      continue;
    }
    LanczosOutcome out = lanczos_solve(sys, k, opts, sigma, llt);
    if (out.converged) return out.result;
    break;
  }
  if (N <= opts.dense_fallback_limit) return dense_solve(sys, k);
  throw SolverFailure("iterative eigensolver failed to converge");
}

EigenResult solve_domain(const Domain& domain, int n, int k,
                         const EigenOptions& opts) {
  FormCoefficients fc = std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Parallelogram>) {
          return parallelogram_form(d);
        } else {
          return strip_form(d);
        }
      },
      domain);
  spd_certify(fc, n);
  AssembledSystem sys = assemble(fc, Grid{n});
  return lowest_eigenpairs(sys, k, opts);
}

Extrapolated extrapolate(double value_n, double value_2n) {
  Extrapolated e;
  e.estimate = (4.0 * value_2n - value_n) / 3.0;
  e.error_indicator = std::abs(value_2n - value_n) / 3.0;
  return e;
}

void dump_matrix(const SparseMat& m, std::ostream& out) {
  long long nnz = 0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMat::InnerIterator it(m, c); it; ++it) {
      if (it.row() >= c) ++nnz;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%lld %lld\n",
                static_cast<long long>(m.rows()), nnz);
  out << buf;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMat::InnerIterator it(m, c); it; ++it) {
      if (it.row() < c) continue;
      std::snprintf(buf, sizeof(buf), "%lld %d %.17g\n",
                    static_cast<long long>(it.row()), c, it.value());
      out << buf;
    }
  }
}

}  // namespace nbl
