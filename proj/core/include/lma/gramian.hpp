#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "lma/spectral.hpp"
#include "lma/types.hpp"

namespace lma {

// A Gramian together with its single and pairwise sub-Gramian
// decompositions. All stored matrices are Hermitian (post-symmetrized).
// When some pair has Re(lambda_i^* + lambda_j) >= 0, that pair's
// sub-Gramian does not exist; the pair is recorded in divergent_pairs and
// the full Gramian is reported absent.
struct GramianBundle {
  std::optional<MatrixXd> p;
  MatrixXd q;
  std::vector<MatrixXcd> singles;               // P~_i
  std::vector<std::vector<MatrixXcd>> pairs;    // P_ij
  std::set<std::pair<int, int>> divergent_pairs;
  double residual_full = 0.0;
  double residual_singles = 0.0;
  double residual_pairs = 0.0;
};

struct ResidualReport {
  double full = 0.0;
  std::vector<double> singles;
  std::vector<std::vector<double>> pairs;
  double max_single = 0.0;
  double max_pair = 0.0;
};

// Direct dense solve of A^* P + P A = -Q via complex Schur reduction
// (Bartels-Stewart). Independent of the spectral formula so the two
// paths can cross-check each other.
MatrixXd solve_lyapunov(const StateMatrix& a, const MatrixXd& q);

// P = -sum_{i,j} R_i^* Q R_j / (lambda_i^* + lambda_j).
MatrixXd spectral_gramian(const EigenStructure& eig, const MatrixXd& q);

// P~_i = -{R_i^* Q (lambda_i^* I + A)^{-1}}_H. Needs only
// (lambda_i, u_i, v_i) plus A: no other part of the spectrum.
MatrixXcd sub_gramian_single(const StateMatrix& a, const EigenStructure& eig,
                             const MatrixXd& q, int i);

// P_ij = -{R_i^* Q R_j / (lambda_i^* + lambda_j)}_H.
MatrixXcd sub_gramian_pair(const EigenStructure& eig, const MatrixXd& q,
                           int i, int j);

// Redundancy path: rebuilds the residues from generalized participations
// p_kil and evaluates the same sub-Gramians. pf must be the Generalized
// kind. Omit j for the single sub-Gramian.
MatrixXcd subgramian_via_pf(const StateMatrix& a, const EigenStructure& eig,
                            const PFMatrix& pf, const MatrixXd& q, int i,
                            std::optional<int> j = std::nullopt);

GramianBundle make_bundle(const StateMatrix& a, const EigenStructure& eig,
                          const MatrixXd& q);

// Frobenius residuals of the Lyapunov equations satisfied by P and by
// every sub-Gramian in the bundle.
ResidualReport verify_bundle(const StateMatrix& a, const EigenStructure& eig,
                             const GramianBundle& bundle);

inline bool pair_divergent(const EigenStructure& eig, int i, int j) {
  return (std::conj(eig.lambdas(i)) + eig.lambdas(j)).real() >= 0.0;
}

}  // namespace lma
