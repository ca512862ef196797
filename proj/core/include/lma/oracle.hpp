#pragma once

#include <vector>

#include "lma/energy.hpp"
#include "lma/spectral.hpp"
#include "lma/types.hpp"

namespace lma {

// Sampled trajectory of x' = A x. Propagation uses the exact one-step
// transition map exp(A h), so the samples carry no stepper-order error.
struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;   // x(t_m)
  std::vector<VectorXcd> modes;   // z(t_m) = V x(t_m)
};

struct OracleEntry {
  std::string what;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double rel_deviation = 0.0;
};

struct OracleReport {
  std::vector<OracleEntry> entries;
  double max_rel_deviation = 0.0;
};

// Default horizon/step satisfying the tail and resolution bounds for a
// stable matrix.
double default_horizon(const EigenStructure& eig);
double default_step(const EigenStructure& eig, double horizon);

Trajectory integrate_trajectory(const StateMatrix& a,
                                const EigenStructure& eig,
                                const VectorXd& x0, double horizon,
                                double step);

// Composite Simpson quadrature of x_k(t)^2 over the trajectory.
double quadrature_state_energy(const Trajectory& traj, int k);

// Quadrature of |z_i(t)|^2.
double quadrature_mode_energy(const Trajectory& traj, int i);

// Closed-form vs quadrature comparison over the requested states/modes
// for one explicit initial condition.
OracleReport oracle_report(const StateMatrix& a, const EigenStructure& eig,
                           const VectorXd& x0,
                           const std::vector<int>& states,
                           const std::vector<int>& modes);

}  // namespace lma
