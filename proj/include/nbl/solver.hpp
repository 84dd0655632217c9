#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nbl/transform.hpp"

namespace nbl {

// Uniform n x n quadrilateral mesh of the unit square.  Node (i, j) sits at
// (i*h, j*h) with h = 1/n and gets index j*(n+1)+i: s varies fastest.
struct Grid {
  int n = 2;
  int nodes_per_side() const { return n + 1; }
  int node_count() const { return (n + 1) * (n + 1); }
  double h() const { return 1.0 / n; }
  int node_index(int i, int j) const { return j * (n + 1) + i; }
};

using SparseMat = Eigen::SparseMatrix<double>;

struct AssembledSystem {
  SparseMat stiffness;  // K, symmetric positive semidefinite
  SparseMat mass;       // M, symmetric positive definite
  Grid grid;
};

// Bilinear elements with natural boundary conditions.  Element integrals
// use 2x2 Gauss for constant coefficients and 3x3 otherwise.  Accumulation
// is ordered so that K and M come out bitwise symmetric.
AssembledSystem assemble(const FormCoefficients& fc, Grid grid);

struct EigenOptions {
  // Shift-invert pole.  Negative keeps K - shift*M SPD; an O(1) magnitude
  // keeps the zero mode's inverted eigenvalue 1/|shift| from dominating the
  // Krylov arithmetic, which would floor the attainable residuals near
  // eps / |shift|.
  double shift = -1.0;
  double residual_tol = 1e-8;    // on ||K x - mu M x|| / ||x||
  int dense_dof_limit = 400;     // direct dense solve up to this many dofs
  int dense_fallback_limit = 4000;
  int max_lanczos_dim = 180;
  std::uint64_t seed = 0x5EED;   // start-vector seed
};

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending, eigenvalues[0] ~ 0
  Eigen::MatrixXd eigenvectors;     // columns, M-normalized
  int n = 0;                        // grid resolution
  std::vector<double> residuals;    // ||K x - mu M x|| / ||x|| per pair
};

// Lowest k eigenpairs of K x = mu M x.  Small problems are solved densely;
// larger ones by shift-invert Lanczos with full reorthogonalization in the
// M inner product, with a dense fallback when iteration stalls.
EigenResult lowest_eigenpairs(const AssembledSystem& sys, int k,
                              const EigenOptions& opts = {});

// geometry -> transform -> spd_certify -> assemble -> lowest_eigenpairs.
EigenResult solve_domain(const Domain& domain, int n, int k,
                         const EigenOptions& opts = {});

struct Extrapolated {
  double estimate = 0.0;
  double error_indicator = 0.0;
};

// Richardson step assuming O(h^2) convergence between grids n and 2n.
Extrapolated extrapolate(double value_n, double value_2n);

// Symmetric coordinate dump: "rows nnz" header, then "i j value" for the
// lower triangle, 0-based, 17 significant digits.
void dump_matrix(const SparseMat& m, std::ostream& out);

}  // namespace nbl
