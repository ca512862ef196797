#include "lma/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lma {

namespace {

// Sort key: Re descending (least damped first), then |Im| ascending,
// then +Im before -Im so a conjugate pair lands in adjacent slots.
bool mode_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  double ia = std::abs(a.imag()), ib = std::abs(b.imag());
  if (ia != ib) return ia < ib;
  return a.imag() > b.imag();
}

void fix_phase(VectorXcd& col) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index k = 0; k < col.size(); ++k) {
    double m = std::abs(col(k));
    if (m > best + 1e-14) {  // strict improvement; first index wins ties
      best = m;
      imax = k;
    }
  }
  Complex pivot = col(imax);
  if (std::abs(pivot) > 0) col *= std::conj(pivot) / std::abs(pivot);
}

}  // namespace

EigenStructure eigendecompose(const StateMatrix& a, double tol) {
  a.validate();
  const int n = a.n();

  Eigen::EigenSolver<MatrixXd> es(a.a);
  if (es.info() != Eigen::Success)
    throw SingularEigenbasis("eigensolver failed to converge");

  VectorXcd lam = es.eigenvalues();
  MatrixXcd vecs = es.eigenvectors();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return mode_less(lam(i), lam(j));
  });

  EigenStructure eig;
  eig.lambdas.resize(n);
  eig.u.resize(n, n);
  eig.conj_pair.assign(n, 0);

  for (int i = 0; i < n; ++i) {
    eig.lambdas(i) = lam(order[i]);
    eig.u.col(i) = vecs.col(order[i]);
  }

  // Simple-spectrum check before any pairing assumptions.
  double max_abs = eig.lambdas.cwiseAbs().maxCoeff();
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      gap = std::min(gap, std::abs(eig.lambdas(i) - eig.lambdas(j)));
  eig.min_gap = (n > 1) ? gap : std::numeric_limits<double>::infinity();
  if (n > 1 && gap < tol * std::max(max_abs, 1e-300))
    throw NonSimpleSpectrum("eigenvalue gap " + std::to_string(gap) +
                            " below tolerance");

  // Identify conjugate pairs (adjacent after the sort), normalize and fix
  // phases, and force exact conjugate symmetry within each pair.
  double imag_tol = 1e-12 * std::max(max_abs, 1.0);
  int i = 0;
  while (i < n) {
    if (std::abs(eig.lambdas(i).imag()) <= imag_tol) {
      eig.lambdas(i) = Complex(eig.lambdas(i).real(), 0.0);
      eig.conj_pair[i] = i;
      VectorXcd col = eig.u.col(i);
      // real eigenvalue of a real matrix: make the eigenvector real
      fix_phase(col);
      col = col.real().cast<Complex>();
      col /= col.norm();
      eig.u.col(i) = col;
      ++i;
    } else {
      if (i + 1 >= n ||
          std::abs(eig.lambdas(i + 1) - std::conj(eig.lambdas(i))) >
              tol * std::max(max_abs, 1.0) * 1e4)
        throw NonSimpleSpectrum("unpaired complex eigenvalue");
      // +Im member first by the sort order
      VectorXcd col = eig.u.col(i);
      col /= col.norm();
      fix_phase(col);
      eig.u.col(i) = col;
      eig.u.col(i + 1) = col.conjugate();
      eig.lambdas(i + 1) = std::conj(eig.lambdas(i));
      eig.conj_pair[i] = i + 1;
      eig.conj_pair[i + 1] = i;
      i += 2;
    }
  }

  // V as the explicit inverse of U: enforces UV = VU = I to machine
  // precision, which downstream identities rely on.
  Eigen::PartialPivLU<MatrixXcd> lu(eig.u);
  double rcond = lu.rcond();
  if (!(rcond > 1e-14))
    throw SingularEigenbasis("eigenvector matrix numerically singular");
  eig.v = lu.inverse();
  eig.cond_u = 1.0 / rcond;

  // Scrub inversion round-off so the structural symmetries hold exactly:
  // real rows for real modes, exact conjugates within pairs.
  for (int r = 0; r < n; ++r) {
    if (eig.conj_pair[r] == r)
      eig.v.row(r) = eig.v.row(r).real().cast<Complex>();
    else if (eig.conj_pair[r] == r + 1)
      eig.v.row(r + 1) = eig.v.row(r).conjugate();
  }

  return eig;
}

ResidueSet residues(const EigenStructure& eig) {
  ResidueSet rs;
  const int n = eig.n();
  rs.r.reserve(n);
  for (int i = 0; i < n; ++i)
    rs.r.push_back(eig.u.col(i) * eig.v.row(i));
  return rs;
}

PFMatrix conventional_pf(const EigenStructure& eig) {
  const int n = eig.n();
  PFMatrix pf;
  pf.kind = PFKind::ConventionalMis;
  pf.values.resize(n, n);
  pf.gen.resize(n);
  for (int i = 0; i < n; ++i) {
    // gen[i](k, l) = u_i^k v_i^l
    pf.gen[i] = eig.u.col(i) * eig.v.row(i);
    pf.values.col(i) = pf.gen[i].diagonal();
  }
  return pf;
}

PFMatrix simpf(const EigenStructure& eig) {
  const int n = eig.n();
  PFMatrix pf;
  pf.kind = PFKind::Simpf;
  pf.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double denom = eig.v.row(i).squaredNorm();
    for (int k = 0; k < n; ++k)
      pf.values(k, i) = std::norm(eig.v(i, k)) / denom;
  }
  return pf;
}

SensitivityReport eigenvalue_sensitivity_check(const StateMatrix& a,
                                               const EigenStructure& eig,
                                               double delta) {
  const int n = a.n();
  PFMatrix pf = conventional_pf(eig);
  SensitivityReport rep;

  auto nearest = [&](const VectorXcd& lams, Complex target) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    double second = bd;
    for (int i = 0; i < static_cast<int>(lams.size()); ++i) {
      double d = std::abs(lams(i) - target);
      if (d < bd) {
        second = bd;
        bd = d;
        best = i;
      } else if (d < second) {
        second = d;
      }
    }
    if (second - bd < 1e-12 * std::max(1.0, std::abs(target)))
      throw NonSimpleSpectrum("ambiguous mode match in finite difference");
    return lams(best);
  };

  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      StateMatrix ap = a, am = a;
      ap.a(l, k) += delta;
      am.a(l, k) -= delta;
      EigenStructure ep = eigendecompose(ap);
      EigenStructure em = eigendecompose(am);
      for (int i = 0; i < n; ++i) {
        Complex lp = nearest(ep.lambdas, eig.lambdas(i));
        Complex lm = nearest(em.lambdas, eig.lambdas(i));
        Complex fd = (lp - lm) / (2.0 * delta);
        Complex p = pf.gen[i](k, l);
        double scale = std::max(std::abs(p), 1.0);
        double dev = std::abs(fd - p) / scale;
        if (dev > rep.max_rel_deviation) {
          rep.max_rel_deviation = dev;
          rep.worst_k = k;
          rep.worst_i = i;
          rep.worst_l = l;
        }
      }
    }
  }
  return rep;
}

}  // namespace lma
