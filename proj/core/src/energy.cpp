#include "lma/energy.hpp"

#include <cmath>
#include <limits>

namespace lma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Complex dot_c(const Eigen::RowVectorXcd& x, const Eigen::RowVectorXcd& y) {
  // <x, y> = sum_l conj(x_l) y_l
  return (x.conjugate().array() * y.array()).sum();
}

Complex dot_t(const Eigen::RowVectorXcd& x, const Eigen::RowVectorXcd& y) {
  // x^T y = sum_l x_l y_l
  return (x.array() * y.array()).sum();
}

void check_pair(const EigenStructure& eig, int i, int j) {
  if ((std::conj(eig.lambdas(i)) + eig.lambdas(j)).real() >= 0.0)
    throw DivergentPair("divergent mode pair (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
}

// E_{x_k} without the dimensional weight, from the direct Lyapunov solve.
// This is deliberately a different computational path than the pairwise
// spectral sums used for the numerators.
double state_energy_raw(const StateMatrix& a, const EigenStructure& eig,
                        const InitialConditionPolicy& ic, int k) {
  if (!eig.is_stable()) return kInf;
  const int n = a.n();
  MatrixXd q = MatrixXd::Zero(n, n);
  q(k, k) = 1.0;
  MatrixXd p = solve_lyapunov(a, q);
  if (ic.spherical_kind()) return p.trace();
  VectorXd x0 = ic.vec(n);
  return x0.dot(p * x0);
}

}  // namespace

VectorXd InitialConditionPolicy::vec(int n) const {
  switch (kind) {
    case Kind::UnitVector: {
      if (index < 0 || index >= n)
        throw Error("unit-vector initial condition index out of range");
      VectorXd e = VectorXd::Zero(n);
      e(index) = 1.0;
      return e;
    }
    case Kind::Explicit:
      if (x0.size() != n)
        throw DimensionMismatch("explicit initial condition length mismatch");
      return x0;
    case Kind::Spherical:
      break;
  }
  throw Error("spherical policy has no concrete initial vector");
}

double state_energy(const StateMatrix& a, const EigenStructure& eig,
                    const InitialConditionPolicy& ic, int k) {
  double c = a.scale_at(k);
  double e = state_energy_raw(a, eig, ic, k);
  return c * c * e;
}

double mode_energy(const StateMatrix& a, const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int i) {
  double decay = -2.0 * eig.lambdas(i).real();
  double weight = 1.0;  // |u_i|^2 = 1 by normalization
  if (a.has_scale()) {
    Complex cu = (a.scale.cast<Complex>().array() * eig.u.col(i).array()).sum();
    weight = std::norm(cu);
  }
  double num;
  if (ic.spherical_kind()) {
    num = eig.v.row(i).squaredNorm();
  } else {
    VectorXd x0 = ic.vec(eig.n());
    Complex zi = eig.v.row(i) * x0.cast<Complex>();
    num = std::norm(zi);
  }
  if (decay <= 0.0) return num == 0.0 ? 0.0 : kInf;
  return weight * num / decay;
}

double pair_state_energy(const EigenStructure& eig,
                         const InitialConditionPolicy& ic, int k, int i,
                         int j) {
  check_pair(eig, i, j);
  Complex di = std::conj(eig.lambdas(i)) + eig.lambdas(j);
  Complex dt = eig.lambdas(i) + eig.lambdas(j);
  Complex uik = eig.u(k, i), ujk = eig.u(k, j);

  if (ic.spherical_kind()) {
    Complex vv_c = dot_c(eig.v.row(i), eig.v.row(j));
    Complex vv_t = dot_t(eig.v.row(i), eig.v.row(j));
    return -0.5 * (vv_c * std::conj(uik) * ujk / di +
                   vv_t * uik * ujk / dt)
                      .real();
  }
  VectorXcd z0 = eig.v * ic.vec(eig.n()).cast<Complex>();
  Complex zi = z0(i), zj = z0(j);
  return -0.5 * (std::conj(zi) * std::conj(uik) * ujk * zj / di +
                 zi * uik * ujk * zj / dt)
                    .real();
}

double mode_state_energy(const EigenStructure& eig,
                         const InitialConditionPolicy& ic, int k, int i) {
  double e = 0.0;
  for (int j = 0; j < eig.n(); ++j) e += pair_state_energy(eig, ic, k, i, j);
  return e;
}

VectorXd mislpf(const StateMatrix& a, const EigenStructure& eig,
                const InitialConditionPolicy& ic, int k) {
  if (!eig.is_stable())
    throw UnstableSystem("state energy infinite: MISLPF undefined");
  double exk = state_energy_raw(a, eig, ic, k);
  if (std::abs(exk) < 1e-300 || !std::isfinite(exk))
    throw ZeroEnergy("state energy zero for state " + std::to_string(k));
  VectorXd e(eig.n());
  for (int i = 0; i < eig.n(); ++i)
    e(i) = mode_state_energy(eig, ic, k, i) / exk;
  return e;
}

VectorXd mislpf_generalized(const StateMatrix& a, const EigenStructure& eig,
                            int k, int l) {
  const int n = a.n();
  MatrixXd q = MatrixXd::Zero(n, n);
  q(k, k) = 1.0;
  if (!eig.is_stable())
    throw UnstableSystem("state energy infinite: MISLPF undefined");
  MatrixXd pxk = solve_lyapunov(a, q);
  double denom = pxk(l, l);
  if (std::abs(denom) <= 1e-12 * std::max(pxk.trace(), 1e-300))
    throw ZeroEnergy("(P_{x_k})_ll vanishes for l = " + std::to_string(l));
  auto ic = InitialConditionPolicy::unit_vector(l);
  VectorXd e(n);
  for (int i = 0; i < n; ++i)
    e(i) = mode_state_energy(eig, ic, k, i) / denom;
  return e;
}

VectorXd simlpf(const EigenStructure& eig, const InitialConditionPolicy& ic,
                int i) {
  const int n = eig.n();
  VectorXd eps(n);
  if (ic.spherical_kind()) {
    double denom = eig.v.row(i).squaredNorm();
    for (int k = 0; k < n; ++k) eps(k) = std::norm(eig.v(i, k)) / denom;
    return eps;
  }
  VectorXd x0 = ic.vec(n);
  Complex zi = eig.v.row(i) * x0.cast<Complex>();
  if (std::abs(zi) <= 1e-12 * x0.norm() * eig.v.row(i).norm())
    throw ZeroEnergy("z_i(0) = 0: mode " + std::to_string(i) +
                     " not excited by x0");
  double denom = std::norm(zi);
  for (int k = 0; k < n; ++k)
    eps(k) = (std::conj(zi) * eig.v(i, k) * x0(k)).real() / denom;
  return eps;
}

double modal_contribution(const EigenStructure& eig,
                          const InitialConditionPolicy& ic, int i) {
  const int n = eig.n();
  Complex acc = 0.0;
  if (ic.spherical_kind()) {
    for (int j = 0; j < n; ++j) {
      check_pair(eig, i, j);
      Complex uu = dot_c(eig.u.col(i).transpose(), eig.u.col(j).transpose());
      Complex vv = dot_c(eig.v.row(i), eig.v.row(j));
      acc += uu * vv / (std::conj(eig.lambdas(i)) + eig.lambdas(j));
    }
  } else {
    VectorXcd z0 = eig.v * ic.vec(n).cast<Complex>();
    for (int j = 0; j < n; ++j) {
      check_pair(eig, i, j);
      Complex uu = dot_c(eig.u.col(i).transpose(), eig.u.col(j).transpose());
      acc += uu * std::conj(z0(i)) * z0(j) /
             (std::conj(eig.lambdas(i)) + eig.lambdas(j));
    }
  }
  return -acc.real();
}

double lmie(const EigenStructure& eig, const InitialConditionPolicy& ic,
            int i, int j) {
  if (ic.spherical_kind()) return lmie_averaged(eig, i, j);
  check_pair(eig, i, j);
  Complex di = std::conj(eig.lambdas(i)) + eig.lambdas(j);
  Complex dt = eig.lambdas(i) + eig.lambdas(j);
  Complex uu_c = dot_c(eig.u.col(i).transpose(), eig.u.col(j).transpose());
  Complex uu_t = dot_t(eig.u.col(i).transpose(), eig.u.col(j).transpose());
  VectorXcd z0 = eig.v * ic.vec(eig.n()).cast<Complex>();
  Complex zi = z0(i), zj = z0(j);
  return -0.5 *
         (uu_c * std::conj(zi) * zj / di + uu_t * zi * zj / dt).real();
}

double lmie_averaged(const EigenStructure& eig, int i, int j) {
  check_pair(eig, i, j);
  Complex di = std::conj(eig.lambdas(i)) + eig.lambdas(j);
  Complex dt = eig.lambdas(i) + eig.lambdas(j);
  // trace(R_i^* R_j) = <u_i, u_j><v_i, v_j>; trace(R_i^T R_j) likewise
  // with plain transposed products.
  Complex tr_c = dot_c(eig.u.col(i).transpose(), eig.u.col(j).transpose()) *
                 dot_c(eig.v.row(i), eig.v.row(j));
  Complex tr_t = dot_t(eig.u.col(i).transpose(), eig.u.col(j).transpose()) *
                 dot_t(eig.v.row(i), eig.v.row(j));
  return -0.5 * (tr_c / di + tr_t / dt).real();
}

LmifRow lmif(const EigenStructure& eig, int i) {
  const int n = eig.n();
  LmifRow row;
  row.values.resize(n);
  double denom = 0.0;
  std::vector<double> raw(n, 0.0);
  std::vector<bool> divergent(n, false);
  for (int j = 0; j < n; ++j) {
    if ((std::conj(eig.lambdas(i)) + eig.lambdas(j)).real() >= 0.0) {
      divergent[j] = true;  // paper's +inf convention
      continue;
    }
    raw[j] = lmie_averaged(eig, i, j);
    denom += std::abs(raw[j]);
  }
  for (int j = 0; j < n; ++j) {
    if (divergent[j]) {
      row.values(j) = kInf;
    } else if (denom == 0.0) {
      row.undefined = true;
      row.values(j) = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.values(j) = raw[j] / denom;
    }
  }
  return row;
}

double pair_mislpf(const StateMatrix& a, const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int k, int i, int j) {
  if (!eig.is_stable())
    throw UnstableSystem("state energy infinite: pair MISLPF undefined");
  double exk = state_energy_raw(a, eig, ic, k);
  if (std::abs(exk) < 1e-300)
    throw ZeroEnergy("state energy zero for state " + std::to_string(k));
  return pair_state_energy(eig, ic, k, i, j) / exk;
}

double pair_simlpf(const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int i, int k, int l) {
  if (ic.spherical_kind()) {
    if (k != l) return 0.0;
    double denom = eig.v.row(i).squaredNorm();
    return std::norm(eig.v(i, k)) / denom;
  }
  VectorXd x0 = ic.vec(eig.n());
  Complex zi = eig.v.row(i) * x0.cast<Complex>();
  if (std::abs(zi) <= 1e-12 * x0.norm() * eig.v.row(i).norm())
    throw ZeroEnergy("z_i(0) = 0: mode " + std::to_string(i) +
                     " not excited by x0");
  return (std::conj(eig.v(i, l)) * eig.v(i, k)).real() * x0(l) * x0(k) /
         std::norm(zi);
}

namespace {

// P_(ij) as a dense matrix; both constituent products are rank one.
MatrixXcd lmie_matrix(const EigenStructure& eig, int i, int j) {
  check_pair(eig, i, j);
  Complex di = std::conj(eig.lambdas(i)) + eig.lambdas(j);
  Complex dt = eig.lambdas(i) + eig.lambdas(j);
  Complex uu_c = dot_c(eig.u.col(i).transpose(), eig.u.col(j).transpose());
  Complex uu_t = dot_t(eig.u.col(i).transpose(), eig.u.col(j).transpose());
  MatrixXcd m = uu_c / di * (eig.v.row(i).conjugate().transpose() *
                             eig.v.row(j)) +
                uu_t / dt * (eig.v.row(i).transpose() * eig.v.row(j));
  return hermitian_part(-0.5 * m);
}

}  // namespace

double state_participation_lmie(const EigenStructure& eig,
                                const InitialConditionPolicy& ic, int k,
                                int i, int j) {
  MatrixXcd pij = lmie_matrix(eig, i, j);
  double num, denom;
  if (ic.spherical_kind()) {
    // trace(P_(ij)k) = (P_(ij))_kk
    num = pij(k, k).real();
    denom = pij.trace().real();
  } else {
    VectorXcd x0 = ic.vec(eig.n()).cast<Complex>();
    Complex px = (x0.adjoint() * pij * x0)(0, 0);
    // P_(ij)k = (P e_k e_k^T + e_k e_k^T P)/2
    Complex row = (pij.row(k) * x0)(0, 0);
    num = (x0(k).real() * row).real();
    denom = px.real();
  }
  if (std::abs(denom) < 1e-300 || !std::isfinite(denom))
    throw ZeroEnergy("LMIE zero: state participation undefined");
  return num / denom;
}

Property1Forms property1_forms(const StateMatrix& a,
                               const EigenStructure& eig, const PFMatrix& pf,
                               int k, int i, std::optional<int> j) {
  const int n = a.n();
  Property1Forms out;
  Complex pki = pf.values(k, i);
  // [(lambda_i^* I + A)^{-1}]_kk via a single linear solve
  MatrixXcd shifted = std::conj(eig.lambdas(i)) * MatrixXcd::Identity(n, n) +
                      a.a.cast<Complex>();
  VectorXcd ek = VectorXcd::Zero(n);
  ek(k) = 1.0;
  Complex rkk = shifted.partialPivLu().solve(ek)(k);
  out.energy_mislpf = -(std::conj(pki) * rkk).real();
  if (j) {
    Complex pkj = pf.values(k, *j);
    Complex di = std::conj(eig.lambdas(i)) + eig.lambdas(*j);
    Complex dt = eig.lambdas(i) + eig.lambdas(*j);
    out.energy_pair =
        -0.5 * (std::conj(pki) * pkj / di + pki * pkj / dt).real();
  }
  return out;
}

EnergyReport build_energy_report(const StateMatrix& a,
                                 const EigenStructure& eig,
                                 const InitialConditionPolicy& ic) {
  const int n = eig.n();
  EnergyReport rep;
  rep.state_energies.resize(n);
  rep.mode_energies.resize(n);
  rep.modal_contributions.resize(n);
  rep.lmie.resize(n, n);
  rep.state_divergent.assign(n, false);
  rep.mode_divergent.assign(n, false);

  bool stable = eig.is_stable();
  for (int k = 0; k < n; ++k) {
    rep.state_energies(k) = state_energy(a, eig, ic, k);
    rep.state_divergent[k] = !std::isfinite(rep.state_energies(k));
  }
  for (int i = 0; i < n; ++i) {
    rep.mode_energies(i) = mode_energy(a, eig, ic, i);
    rep.mode_divergent[i] = !std::isfinite(rep.mode_energies(i));
    try {
      rep.modal_contributions(i) = modal_contribution(eig, ic, i);
    } catch (const DivergentPair&) {
      rep.modal_contributions(i) = kInf;
    }
    for (int j = 0; j < n; ++j) {
      try {
        rep.lmie(i, j) = lmie(eig, ic, i, j);
      } catch (const DivergentPair&) {
        rep.lmie(i, j) = kInf;
      }
    }
  }
  rep.total_state = stable ? rep.state_energies.sum() : kInf;
  rep.total_mode = rep.mode_energies.sum();
  rep.any_divergent = !stable;
  return rep;
}

}  // namespace lma
