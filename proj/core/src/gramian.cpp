#include "lma/gramian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace lma {

namespace {

void require_stable(const VectorXcd& lams) {
  for (Eigen::Index i = 0; i < lams.size(); ++i)
    if (lams(i).real() >= 0.0)
      throw UnstableSystem("eigenvalue with Re >= 0: the Gramian diverges");
}

void require_hermitian(const MatrixXd& q) {
  if (q.rows() != q.cols()) throw DimensionMismatch("Q must be square");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()))
    throw Error("Q must be symmetric");
}

}  // namespace

MatrixXd solve_lyapunov(const StateMatrix& a, const MatrixXd& q) {
  a.validate();
  require_hermitian(q);
  const int n = a.n();
  if (q.rows() != n) throw DimensionMismatch("Q dimension mismatch");

  {
    Eigen::EigenSolver<MatrixXd> es(a.a, /*computeEigenvectors=*/false);
    require_stable(es.eigenvalues());
  }

  // Bartels-Stewart on the complex Schur form: A = Z T Z^*, solve
  // T^* Y + Y T = -C column by column (T upper triangular).
  Eigen::ComplexSchur<MatrixXd> schur(a.a);
  if (schur.info() != Eigen::Success)
    throw Error("Schur decomposition failed");
  const MatrixXcd t = schur.matrixT();
  const MatrixXcd z = schur.matrixU();
  MatrixXcd c = z.adjoint() * q.cast<Complex>() * z;

  MatrixXcd y = MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXcd rhs = -c.col(j);
    for (int k = 0; k < j; ++k) rhs -= t(k, j) * y.col(k);
    // (T^* + t_jj I) is lower triangular: forward substitution.
    for (int r = 0; r < n; ++r) {
      Complex acc = rhs(r);
      for (int s = 0; s < r; ++s) acc -= std::conj(t(s, r)) * y(s, j);
      y(r, j) = acc / (std::conj(t(r, r)) + t(j, j));
    }
  }

  MatrixXcd p = z * y * z.adjoint();
  return 0.5 * (p + p.adjoint()).real();
}

MatrixXd spectral_gramian(const EigenStructure& eig, const MatrixXd& q) {
  const int n = eig.n();
  ResidueSet rs = residues(eig);
  MatrixXcd qc = q.cast<Complex>();
  MatrixXcd p = MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    MatrixXcd riq = rs.r[i].adjoint() * qc;
    for (int j = 0; j < n; ++j) {
      Complex denom = std::conj(eig.lambdas(i)) + eig.lambdas(j);
      if (denom.real() >= 0.0)
        throw DivergentPair("Re(lambda_i^* + lambda_j) >= 0");
      p -= riq * rs.r[j] / denom;
    }
  }
  return hermitian_part(p).real();
}

MatrixXcd sub_gramian_single(const StateMatrix& a, const EigenStructure& eig,
                             const MatrixXd& q, int i) {
  const Complex li = eig.lambdas(i);
  if (li.real() >= 0.0)
    throw DivergentPair("Re(lambda_i) >= 0");
  for (int j = 0; j < eig.n(); ++j)
    if (pair_divergent(eig, i, j))
      throw DivergentPair("Re(lambda_i^* + lambda_j) >= 0");

  const int n = a.n();
  MatrixXcd ri = eig.u.col(i) * eig.v.row(i);
  MatrixXcd shifted = std::conj(li) * MatrixXcd::Identity(n, n) +
                      a.a.cast<Complex>();
  MatrixXcd inv = shifted.partialPivLu().solve(MatrixXcd::Identity(n, n));
  return hermitian_part(-(ri.adjoint() * q.cast<Complex>() * inv));
}

MatrixXcd sub_gramian_pair(const EigenStructure& eig, const MatrixXd& q,
                           int i, int j) {
  if (pair_divergent(eig, i, j))
    throw DivergentPair("Re(lambda_i^* + lambda_j) >= 0");
  MatrixXcd ri = eig.u.col(i) * eig.v.row(i);
  MatrixXcd rj = eig.u.col(j) * eig.v.row(j);
  Complex denom = std::conj(eig.lambdas(i)) + eig.lambdas(j);
  return hermitian_part(-(ri.adjoint() * q.cast<Complex>() * rj) / denom);
}

MatrixXcd subgramian_via_pf(const StateMatrix& a, const EigenStructure& eig,
                            const PFMatrix& pf, const MatrixXd& q, int i,
                            std::optional<int> j) {
  if (pf.kind != PFKind::ConventionalMis || pf.gen.empty())
    throw Error("subgramian_via_pf requires generalized participations");
  const int n = a.n();

  // R_m = sum_{k,l} p_mkl e_k e_l^T: the residue reassembled from the
  // generalized participations alone, no eigenvectors touched here.
  auto residue_from_pf = [&](int m) -> const MatrixXcd& { return pf.gen[m]; };

  const MatrixXcd& ri = residue_from_pf(i);
  if (j) {
    if (pair_divergent(eig, i, *j))
      throw DivergentPair("Re(lambda_i^* + lambda_j) >= 0");
    MatrixXcd rj = residue_from_pf(*j);
    Complex denom = std::conj(eig.lambdas(i)) + eig.lambdas(*j);
    return hermitian_part(-(ri.adjoint() * q.cast<Complex>() * rj) / denom);
  }
  for (int jj = 0; jj < n; ++jj)
    if (pair_divergent(eig, i, jj))
      throw DivergentPair("Re(lambda_i^* + lambda_j) >= 0");
  MatrixXcd shifted = std::conj(eig.lambdas(i)) * MatrixXcd::Identity(n, n) +
                      a.a.cast<Complex>();
  MatrixXcd inv = shifted.partialPivLu().solve(MatrixXcd::Identity(n, n));
  return hermitian_part(-(ri.adjoint() * q.cast<Complex>() * inv));
}

GramianBundle make_bundle(const StateMatrix& a, const EigenStructure& eig,
                          const MatrixXd& q) {
  require_hermitian(q);
  const int n = eig.n();
  GramianBundle b;
  b.q = q;
  b.pairs.assign(n, std::vector<MatrixXcd>(n));
  ResidueSet rs = residues(eig);
  MatrixXcd qc = q.cast<Complex>();

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex denom = std::conj(eig.lambdas(i)) + eig.lambdas(j);
      if (denom.real() >= 0.0) {
        b.divergent_pairs.insert({i, j});
        continue;
      }
      b.pairs[i][j] =
          hermitian_part(-(rs.r[i].adjoint() * qc * rs.r[j]) / denom);
    }
  }

  b.singles.resize(n);
  for (int i = 0; i < n; ++i) {
    bool ok = true;
    MatrixXcd acc = MatrixXcd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      if (b.divergent_pairs.count({i, j})) {
        ok = false;
        break;
      }
      acc += b.pairs[i][j];
    }
    if (ok) b.singles[i] = acc;
  }

  if (b.divergent_pairs.empty()) {
    b.p = solve_lyapunov(a, q);
    ResidualReport rep = verify_bundle(a, eig, b);
    b.residual_full = rep.full;
    b.residual_singles = rep.max_single;
    b.residual_pairs = rep.max_pair;
  }
  return b;
}

ResidualReport verify_bundle(const StateMatrix& a, const EigenStructure& eig,
                             const GramianBundle& bundle) {
  const int n = eig.n();
  ResidualReport rep;
  MatrixXcd ac = a.a.cast<Complex>();
  MatrixXcd qc = bundle.q.cast<Complex>();
  ResidueSet rs = residues(eig);

  if (bundle.p) {
    MatrixXcd pc = bundle.p->cast<Complex>();
    rep.full = (ac.adjoint() * pc + pc * ac + qc).norm();
  }

  rep.singles.assign(n, 0.0);
  rep.pairs.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    if (bundle.singles[i].size() == 0) continue;
    const MatrixXcd& pi = bundle.singles[i];
    MatrixXcd rhs = 0.5 * (rs.r[i].adjoint() * qc + qc * rs.r[i]);
    rep.singles[i] = (ac.adjoint() * pi + pi * ac + rhs).norm();
    rep.max_single = std::max(rep.max_single, rep.singles[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (bundle.divergent_pairs.count({i, j})) continue;
      const MatrixXcd& pij = bundle.pairs[i][j];
      MatrixXcd rhs = 0.5 * (rs.r[i].adjoint() * qc * rs.r[j] +
                             rs.r[j].adjoint() * qc * rs.r[i]);
      rep.pairs[i][j] = (ac.adjoint() * pij + pij * ac + rhs).norm();
      rep.max_pair = std::max(rep.max_pair, rep.pairs[i][j]);
    }
  }
  return rep;
}

}  // namespace lma
