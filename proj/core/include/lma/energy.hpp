#pragma once

#include <optional>
#include <vector>

#include "lma/gramian.hpp"
#include "lma/spectral.hpp"
#include "lma/types.hpp"

namespace lma {

// How the initial state enters the energy indicators: a canonical unit
// vector, an explicit vector, or averaging over a spherically symmetric
// distribution (zero mean, unit variance, independent components).
struct InitialConditionPolicy {
  enum class Kind { UnitVector, Spherical, Explicit };

  Kind kind = Kind::Spherical;
  int index = -1;  // UnitVector
  VectorXd x0;     // Explicit

  static InitialConditionPolicy unit_vector(int k) {
    InitialConditionPolicy p;
    p.kind = Kind::UnitVector;
    p.index = k;
    return p;
  }
  static InitialConditionPolicy spherical() { return {}; }
  static InitialConditionPolicy explicit_x0(VectorXd v) {
    if (v.size() == 0 || v.norm() == 0.0)
      throw Error("explicit initial condition must be nonzero");
    InitialConditionPolicy p;
    p.kind = Kind::Explicit;
    p.x0 = std::move(v);
    return p;
  }

  bool spherical_kind() const { return kind == Kind::Spherical; }

  // Concrete vector for the non-spherical policies.
  VectorXd vec(int n) const;
};

struct EnergyReport {
  VectorXd state_energies;       // E_{x_k}
  VectorXd mode_energies;        // E_{z_i} (invariant weight applied)
  VectorXd modal_contributions;  // E-bar_{z_i}
  double total_state = 0.0;      // E_x
  double total_mode = 0.0;       // E_z
  MatrixXd lmie;                 // E-bar_{z,ij}
  std::vector<bool> state_divergent;
  std::vector<bool> mode_divergent;
  bool any_divergent = false;
};

struct LmifRow {
  VectorXd values;  // +inf entries for divergent pairs
  bool undefined = false;
};

// --- Energies ---------------------------------------------------------

// E_{x_k} = x0^T P_{x_k} x0 (trace for the spherical policy), with
// A^* P_{x_k} + P_{x_k} A = -e_k e_k^T. Unstable systems yield +inf.
// The per-state scale coefficient c_k enters squared.
double state_energy(const StateMatrix& a, const EigenStructure& eig,
                    const InitialConditionPolicy& ic, int k);

// E_{z_i} = |z_i(0)|^2 / (-2 Re lambda_i), weighted by |c^T u_i|^2 when a
// scale vector is present (|u_i|^2 = 1 otherwise). +inf if Re lambda_i >= 0.
double mode_energy(const StateMatrix& a, const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int i);

// E_{x_k i j}: Lyapunov energy of the k-th state produced by the (i,j)
// mode pair.
double pair_state_energy(const EigenStructure& eig,
                         const InitialConditionPolicy& ic, int k, int i,
                         int j);

// E_{x_k i} = sum_j E_{x_k i j}.
double mode_state_energy(const EigenStructure& eig,
                         const InitialConditionPolicy& ic, int k, int i);

// --- Participation factors -------------------------------------------

// e_ki over i; sum_i e_ki = 1. Values may lie outside [0, 1].
VectorXd mislpf(const StateMatrix& a, const EigenStructure& eig,
                const InitialConditionPolicy& ic, int k);

// e_kil over i for the initial condition x0 = e_l, l != k.
VectorXd mislpf_generalized(const StateMatrix& a, const EigenStructure& eig,
                            int k, int l);

// eps_ki over k; sum_k eps_ki = 1. Under the spherical policy this equals
// the conventional state-in-mode PF.
VectorXd simlpf(const EigenStructure& eig, const InitialConditionPolicy& ic,
                int i);

// Modal contribution E-bar_{z_i}; may be negative; sum_i = E_x.
double modal_contribution(const EigenStructure& eig,
                          const InitialConditionPolicy& ic, int i);

// Lyapunov modal interaction energy of the (i, j) pair.
double lmie(const EigenStructure& eig, const InitialConditionPolicy& ic,
            int i, int j);

// Spherically averaged LMIE from the trace formula.
double lmie_averaged(const EigenStructure& eig, int i, int j);

// LMIF_ij over j, normalized so sum_j |LMIF_ij| = 1 over finite entries;
// +inf where Re(lambda_i^* + lambda_j) >= 0.
LmifRow lmif(const EigenStructure& eig, int i);

// Pair MISLPF e~_{k(ij)} = E_{x_k i j} / E_{x_k}.
double pair_mislpf(const StateMatrix& a, const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int k, int i, int j);

// Pair SIMLPF eps~_{i(kl)}; the spherical policy reduces it to
// delta_kl * eps_ki.
double pair_simlpf(const EigenStructure& eig,
                   const InitialConditionPolicy& ic, int i, int k, int l);

// Relative participation of the k-th state in the LMIE of (i, j).
double state_participation_lmie(const EigenStructure& eig,
                                const InitialConditionPolicy& ic, int k,
                                int i, int j);

struct Property1Forms {
  double energy_mislpf = 0.0;       // E_{x_k} * e_ki from conventional PFs
  std::optional<double> energy_pair;  // E_{x_k} * e~_{k(ij)} when j given
};

// Closed forms of the unnormalized Lyapunov PFs through conventional PFs
// (unit-vector policy x0 = e_k). pf may carry finite-difference
// sensitivities in place of exact participations.
Property1Forms property1_forms(const StateMatrix& a,
                               const EigenStructure& eig, const PFMatrix& pf,
                               int k, int i, std::optional<int> j);

EnergyReport build_energy_report(const StateMatrix& a,
                                 const EigenStructure& eig,
                                 const InitialConditionPolicy& ic);

}  // namespace lma
