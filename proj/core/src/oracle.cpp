#include "lma/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace lma {

double default_horizon(const EigenStructure& eig) {
  double abscissa = eig.spectral_abscissa();
  if (abscissa >= 0.0)
    throw UnstableSystem("trajectory energy diverges: no finite horizon");
  return std::min(std::log(1e8) / -abscissa, 1e4);
}

double default_step(const EigenStructure& eig, double horizon) {
  double max_abs = eig.lambdas.cwiseAbs().maxCoeff();
  double h = std::min(0.01, 0.1 / std::max(max_abs, 1e-12));
  return std::min(h, horizon / 1e4);
}

Trajectory integrate_trajectory(const StateMatrix& a,
                                const EigenStructure& eig,
                                const VectorXd& x0, double horizon,
                                double step) {
  if (horizon <= 0.0 || step <= 0.0)
    throw Error("horizon and step must be positive");
  const int n = a.n();
  if (x0.size() != n) throw DimensionMismatch("x0 length mismatch");

  std::size_t m = static_cast<std::size_t>(std::ceil(horizon / step));
  if (m % 2 == 1) ++m;  // even interval count for Simpson weights

  MatrixXd phi = (a.a * step).exp();

  Trajectory traj;
  traj.times.reserve(m + 1);
  traj.states.reserve(m + 1);
  traj.modes.reserve(m + 1);
  VectorXd x = x0;
  for (std::size_t s = 0; s <= m; ++s) {
    traj.times.push_back(static_cast<double>(s) * step);
    traj.states.push_back(x);
    traj.modes.push_back(eig.v * x.cast<Complex>());
    x = phi * x;
  }

  // Tail bound: the discarded integral of |x|^2 past the horizon relative
  // to what was kept.
  double abscissa = eig.spectral_abscissa();
  if (abscissa < 0.0) {
    double tail = traj.states.back().squaredNorm() / (-2.0 * abscissa);
    double kept = 0.0;
    for (const auto& xs : traj.states) kept += xs.squaredNorm() * step;
    if (kept > 0.0 && tail > 1e-8 * kept)
      throw HorizonTooShort("trajectory tail exceeds 1e-8 of the energy");
  }
  return traj;
}

namespace {

double simpson(const std::vector<double>& f, double h) {
  const std::size_t m = f.size() - 1;  // even by construction
  double acc = f.front() + f.back();
  for (std::size_t s = 1; s < m; ++s) acc += (s % 2 ? 4.0 : 2.0) * f[s];
  return acc * h / 3.0;
}

}  // namespace

double quadrature_state_energy(const Trajectory& traj, int k) {
  std::vector<double> f;
  f.reserve(traj.states.size());
  for (const auto& x : traj.states) f.push_back(x(k) * x(k));
  return simpson(f, traj.times[1] - traj.times[0]);
}

double quadrature_mode_energy(const Trajectory& traj, int i) {
  std::vector<double> f;
  f.reserve(traj.modes.size());
  for (const auto& z : traj.modes) f.push_back(std::norm(z(i)));
  return simpson(f, traj.times[1] - traj.times[0]);
}

OracleReport oracle_report(const StateMatrix& a, const EigenStructure& eig,
                           const VectorXd& x0,
                           const std::vector<int>& states,
                           const std::vector<int>& modes) {
  double horizon = default_horizon(eig);
  double step = default_step(eig, horizon);
  Trajectory traj = integrate_trajectory(a, eig, x0, horizon, step);
  auto ic = InitialConditionPolicy::explicit_x0(x0);

  OracleReport rep;
  auto push = [&](std::string what, double closed, double quad) {
    double scale = std::max({std::abs(closed), std::abs(quad), 1e-30});
    OracleEntry e{std::move(what), closed, quad,
                  std::abs(closed - quad) / scale};
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, e.rel_deviation);
    rep.entries.push_back(std::move(e));
  };

  for (int k : states) {
    double closed = state_energy(a, eig, ic, k);
    push("E_x[" + std::to_string(k) + "]", closed,
         quadrature_state_energy(traj, k));
  }
  for (int i : modes) {
    double closed = mode_energy(a, eig, ic, i);
    push("E_z[" + std::to_string(i) + "]", closed,
         quadrature_mode_energy(traj, i));
  }
  return rep;
}

}  // namespace lma
