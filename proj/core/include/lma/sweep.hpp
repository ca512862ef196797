#pragma once

#include <string>
#include <vector>

#include "lma/energy.hpp"
#include "lma/systems.hpp"
#include "lma/table.hpp"

namespace lma {

struct SweepConfig {
  MatrixFamily family;
  std::vector<double> gamma_grid;          // strictly increasing, >= 2 points
  std::vector<std::string> indicators;     // indicator kinds to tabulate
  InitialConditionPolicy ic = InitialConditionPolicy::spherical();
  double eig_tol = 1e-8;

  void validate() const;
};

// Minimal-cost bijection between two eigenvalue lists under
// cost |prev - cur| (exact assignment, not greedy). assignment[p] is the
// index in `cur` matched to prev member p. Ties are broken
// deterministically by index order.
std::vector<int> track_modes(const std::vector<Complex>& prev,
                             const std::vector<Complex>& cur);

struct SweepPoint {
  double gamma = 0.0;
  bool valid = false;            // simple spectrum obtained here
  bool ill_conditioned = false;  // min_gap < 1e-6 * max|lambda|
  EigenStructure eig;            // empty when !valid
  std::vector<int> track_to_mode;  // track id -> mode index in eig
};

struct ModeTrack {
  std::vector<double> gammas;
  // lambda of each track at each grid point (NaN at flagged gaps)
  std::vector<VectorXcd> lambdas;
  std::vector<double> match_cost;
};

struct Event {
  enum class Kind { Merge, Split, Instability, Restabilization, Resonance };
  Kind kind;
  double gamma_lo = 0.0, gamma_hi = 0.0;
  std::vector<int> tracks;
  double detail = 0.0;  // Resonance: |omega_i - omega_j| at the peak
};

const char* event_kind_name(Event::Kind k);

struct SweepResult {
  std::vector<SweepPoint> points;
  ModeTrack track;
  IndicatorTable table;
  std::vector<Event> events;
};

SweepResult run_sweep(const SweepConfig& cfg);

// Event scan over a completed sweep; run_sweep calls this itself, the
// separate entry point exists for re-analysis with a family at hand for
// bracket refinement.
std::vector<Event> detect_events(const SweepConfig& cfg,
                                 const SweepResult& result);

}  // namespace lma
