#pragma once

#include <optional>
#include <vector>

#include "lma/types.hpp"

namespace lma {

// Eigendecomposition A = U diag(lambda) V with U V = V U = I.
// Conventions enforced by eigendecompose():
//   * modes ordered by (Re descending, |Im| ascending, +Im before -Im),
//     so the least damped mode comes first and indicator tables are
//     reproducible across runs;
//   * a complex conjugate pair occupies adjacent slots, +Im member first;
//   * |u_i| = 1 for every i, and the largest-magnitude component of u_i is
//     real positive (fixes the residual unit-phase freedom);
//   * u_{i*} = conj(u_i), v_{i*} = conj(v_i) for conjugate pairs.
struct EigenStructure {
  VectorXcd lambdas;
  MatrixXcd u;              // right eigenvectors as columns
  MatrixXcd v;              // left eigenvectors as rows: v.row(i) = v_i^T
  std::vector<int> conj_pair;  // i -> i* (i itself for real modes)
  double min_gap = 0.0;     // smallest pairwise eigenvalue distance
  double cond_u = 0.0;      // condition estimate of U

  int n() const { return static_cast<int>(lambdas.size()); }

  bool is_real_mode(int i) const { return conj_pair[i] == i; }

  bool is_stable() const { return (lambdas.real().array() < 0.0).all(); }

  double spectral_abscissa() const { return lambdas.real().maxCoeff(); }
};

// Residue matrices R_i = u_i v_i^T of the resolvent expansion.
struct ResidueSet {
  std::vector<MatrixXcd> r;
};

enum class PFKind {
  ConventionalMis,
  Generalized,
  Simpf,
  Mislpf,
  Simlpf,
  PairMislpf,
  PairSimlpf,
  LmieStatePart,
};

// Two- or three-index participation collections. values(k, i) holds the
// (state k, mode i) entry; for three-index kinds gen[i](k, l) holds the
// (k, i, l) entry.
struct PFMatrix {
  PFKind kind = PFKind::ConventionalMis;
  MatrixXcd values;
  std::vector<MatrixXcd> gen;
};

struct SensitivityReport {
  double max_rel_deviation = 0.0;
  int worst_k = -1, worst_i = -1, worst_l = -1;
};

EigenStructure eigendecompose(const StateMatrix& a, double tol = 1e-8);

ResidueSet residues(const EigenStructure& eig);

// p_ki = u_i^k v_i^k on values; p_kil = u_i^k v_i^l on gen[i].
PFMatrix conventional_pf(const EigenStructure& eig);

// pi_ki = |v_i^k|^2 / |v_i|^2.
PFMatrix simpf(const EigenStructure& eig);

// Compares every p_kil against a central finite difference of lambda_i with
// respect to a_lk, with mode matching by nearest eigenvalue.
SensitivityReport eigenvalue_sensitivity_check(const StateMatrix& a,
                                               const EigenStructure& eig,
                                               double delta);

}  // namespace lma
