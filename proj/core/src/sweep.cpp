#include "lma/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Shortest-augmenting-path assignment (Jonker-Volgenant style), exact and
// deterministic. Greedy matching demonstrably swaps tracks at close
// approaches, which corrupts event detection downstream.
std::vector<int> solve_assignment(const MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> ans(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) ans[p[j] - 1] = j - 1;
  return ans;
}

int find_conjugate(const std::vector<Complex>& lams, int i, double tol) {
  for (int j = 0; j < static_cast<int>(lams.size()); ++j)
    if (j != i && std::abs(lams[j] - std::conj(lams[i])) <= tol) return j;
  return -1;
}

}  // namespace

std::vector<int> track_modes(const std::vector<Complex>& prev,
                             const std::vector<Complex>& cur) {
  if (prev.size() != cur.size())
    throw DimensionMismatch("eigenvalue lists differ in length");
  const int n = static_cast<int>(prev.size());
  MatrixXd cost(n, n);
  double max_abs = 1e-300;
  for (int i = 0; i < n; ++i) {
    max_abs = std::max({max_abs, std::abs(prev[i]), std::abs(cur[i])});
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(prev[i] - cur[j]);
  }
  std::vector<int> a = solve_assignment(cost);

  // Conjugate-pair consistency: a prev pair must map onto a cur pair (or
  // two reals at a split). Repair rare inconsistent images by swapping.
  double tol = 1e-9 * max_abs;
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[a[i]] = i;
  for (int c1 = 0; c1 < n; ++c1) {
    if (cur[c1].imag() <= 0.0) continue;
    int c2 = find_conjugate(cur, c1, tol);
    if (c2 < 0) continue;
    int p1 = inv[c1], p2 = inv[c2];
    bool both_real = std::abs(prev[p1].imag()) <= tol &&
                     std::abs(prev[p2].imag()) <= tol;
    bool conj_pair = std::abs(prev[p2] - std::conj(prev[p1])) <= tol;
    if (both_real || conj_pair) continue;
    int q = find_conjugate(prev, p1, tol);
    if (q >= 0 && q != p2) {
      std::swap(a[p2], a[q]);
      inv[a[p2]] = p2;
      inv[a[q]] = q;
    }
  }
  return a;
}

void SweepConfig::validate() const {
  if (!family) throw Error("sweep config has no matrix family");
  if (gamma_grid.size() < 2)
    throw Error("gamma grid needs at least 2 points");
  for (std::size_t i = 1; i < gamma_grid.size(); ++i)
    if (gamma_grid[i] <= gamma_grid[i - 1])
      throw Error("gamma grid must be strictly increasing");
}

const char* event_kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::Merge: return "MERGE";
    case Event::Kind::Split: return "SPLIT";
    case Event::Kind::Instability: return "INSTABILITY";
    case Event::Kind::Restabilization: return "RESTABILIZATION";
    case Event::Kind::Resonance: return "RESONANCE";
  }
  return "?";
}

namespace {

void add_row(IndicatorTable& table, const std::string& kind, double gamma,
             double value, int i = -1, int j = -1, int k = -1,
             const std::string& flag = "") {
  IndicatorRecord rec;
  rec.kind = kind;
  rec.i = i;
  rec.j = j;
  rec.k = k;
  rec.gamma = gamma;
  rec.value = value;
  rec.flag = flag;
  table.add(rec);
}

bool wants(const SweepConfig& cfg, const std::string& kind) {
  return std::find(cfg.indicators.begin(), cfg.indicators.end(), kind) !=
         cfg.indicators.end();
}

void emit_indicators(const SweepConfig& cfg, const SweepPoint& pt,
                     IndicatorTable& table) {
  const int n = pt.eig.n();
  double g = pt.gamma;
  StateMatrix a = cfg.family(g);
  const auto& ic = cfg.ic;
  std::string base_flag = pt.ill_conditioned ? "ill_conditioned" : "";

  // track id owning each mode index
  std::vector<int> mode_to_track(n, -1);
  for (int t = 0; t < n; ++t) mode_to_track[pt.track_to_mode[t]] = t;
  auto mode_of = [&](int t) { return pt.track_to_mode[t]; };

  if (wants(cfg, "state_energy")) {
    for (int k = 0; k < n; ++k) {
      double e = state_energy(a, pt.eig, ic, k);
      add_row(table, "state_energy", g, e, -1, -1, k,
              std::isfinite(e) ? base_flag : "divergent");
    }
  }
  if (wants(cfg, "mode_energy")) {
    for (int t = 0; t < n; ++t) {
      double e = mode_energy(a, pt.eig, ic, mode_of(t));
      add_row(table, "mode_energy", g, e, t, -1, -1,
              std::isfinite(e) ? base_flag : "divergent");
    }
  }
  if (wants(cfg, "modal_contribution")) {
    for (int t = 0; t < n; ++t) {
      try {
        add_row(table, "modal_contribution", g,
                modal_contribution(pt.eig, ic, mode_of(t)), t, -1, -1,
                base_flag);
      } catch (const DivergentPair&) {
        add_row(table, "modal_contribution", g, kInf, t, -1, -1,
                "divergent");
      }
    }
  }
  if (wants(cfg, "mislpf")) {
    for (int k = 0; k < n; ++k) {
      try {
        VectorXd e = mislpf(a, pt.eig, ic, k);
        for (int t = 0; t < n; ++t)
          add_row(table, "mislpf", g, e(mode_of(t)), t, -1, k, base_flag);
      } catch (const Error&) {
        for (int t = 0; t < n; ++t)
          add_row(table, "mislpf", g, kInf, t, -1, k, "divergent");
      }
    }
  }
  if (wants(cfg, "simlpf")) {
    for (int t = 0; t < n; ++t) {
      try {
        VectorXd eps = simlpf(pt.eig, ic, mode_of(t));
        for (int k = 0; k < n; ++k)
          add_row(table, "simlpf", g, eps(k), t, -1, k, base_flag);
      } catch (const ZeroEnergy&) {
        for (int k = 0; k < n; ++k)
          add_row(table, "simlpf", g, kNan, t, -1, k, "undefined");
      }
    }
  }
  if (wants(cfg, "lmie")) {
    for (int t1 = 0; t1 < n; ++t1) {
      for (int t2 = t1; t2 < n; ++t2) {
        try {
          add_row(table, "lmie", g, lmie(pt.eig, ic, mode_of(t1), mode_of(t2)),
                  t1, t2, -1, base_flag);
        } catch (const DivergentPair&) {
          add_row(table, "lmie", g, kInf, t1, t2, -1, "divergent");
        }
      }
    }
  }
  if (wants(cfg, "lmif")) {
    for (int t1 = 0; t1 < n; ++t1) {
      LmifRow row = lmif(pt.eig, mode_of(t1));
      for (int t2 = 0; t2 < n; ++t2) {
        double v = row.values(mode_of(t2));
        std::string flag = base_flag;
        if (row.undefined) flag = "undefined";
        else if (!std::isfinite(v)) flag = "divergent";
        add_row(table, "lmif", g, v, t1, t2, -1, flag);
      }
    }
  }
  if (wants(cfg, "pair_mislpf")) {
    for (int k = 0; k < n; ++k) {
      for (int t1 = 0; t1 < n; ++t1) {
        for (int t2 = t1; t2 < n; ++t2) {
          try {
            add_row(table, "pair_mislpf", g,
                    pair_mislpf(a, pt.eig, ic, k, mode_of(t1), mode_of(t2)),
                    t1, t2, k, base_flag);
          } catch (const Error&) {
            add_row(table, "pair_mislpf", g, kInf, t1, t2, k, "divergent");
          }
        }
      }
    }
  }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.points.reserve(cfg.gamma_grid.size());

  int n_modes = -1;
  const SweepPoint* last_valid = nullptr;

  for (double g : cfg.gamma_grid) {
    SweepPoint pt;
    pt.gamma = g;
    StateMatrix a = cfg.family(g);
    try {
      pt.eig = eigendecompose(a, cfg.eig_tol);
      pt.valid = true;
      double max_abs = pt.eig.lambdas.cwiseAbs().maxCoeff();
      pt.ill_conditioned = pt.eig.min_gap < 1e-6 * max_abs;
    } catch (const NonSimpleSpectrum&) {
      pt.valid = false;  // flagged gap; tracking bridges over it
    }

    if (pt.valid) {
      const int n = pt.eig.n();
      if (n_modes < 0) n_modes = n;
      if (!last_valid) {
        pt.track_to_mode.resize(n);
        for (int t = 0; t < n; ++t) pt.track_to_mode[t] = t;
        res.track.match_cost.push_back(0.0);
      } else {
        std::vector<Complex> prev(n), cur(n);
        for (int t = 0; t < n; ++t)
          prev[t] = last_valid->eig.lambdas(last_valid->track_to_mode[t]);
        for (int m = 0; m < n; ++m) cur[m] = pt.eig.lambdas(m);
        pt.track_to_mode = track_modes(prev, cur);
        double c = 0.0;
        for (int t = 0; t < n; ++t)
          c += std::abs(prev[t] - cur[pt.track_to_mode[t]]);
        res.track.match_cost.push_back(c);
      }
    }

    res.points.push_back(std::move(pt));
    if (res.points.back().valid) last_valid = &res.points.back();
  }

  // mode-track table
  for (const auto& pt : res.points) {
    res.track.gammas.push_back(pt.gamma);
    VectorXcd row = VectorXcd::Constant(std::max(n_modes, 0),
                                        Complex(kNan, kNan));
    if (pt.valid)
      for (int t = 0; t < n_modes; ++t)
        row(t) = pt.eig.lambdas(pt.track_to_mode[t]);
    res.track.lambdas.push_back(std::move(row));
  }

  for (const auto& pt : res.points) {
    if (pt.valid)
      emit_indicators(cfg, pt, res.table);
    else
      add_row(res.table, "gap", pt.gamma, kNan, -1, -1, -1, "non_simple");
  }

  res.events = detect_events(cfg, res);
  return res;
}

namespace {

bool mode_is_real(const EigenStructure& eig, int m) {
  return eig.conj_pair[m] == m;
}

// Bisection refinement of a real<->complex transition bracket: counts real
// eigenvalues on each side.
void refine_merge_bracket(const MatrixFamily& family, double tol,
                          double& lo, double& hi, int lo_real_count) {
  for (int depth = 0; depth < 20; ++depth) {
    double mid = 0.5 * (lo + hi);
    try {
      EigenStructure eig = eigendecompose(family(mid), tol);
      int real_count = 0;
      for (int m = 0; m < eig.n(); ++m)
        if (mode_is_real(eig, m)) ++real_count;
      if (real_count == lo_real_count)
        lo = mid;
      else
        hi = mid;
    } catch (const NonSimpleSpectrum&) {
      // landed on the coalescence point itself
      double eps = 1e-12 * (1.0 + std::abs(mid));
      lo = mid - eps;
      hi = mid + eps;
      return;
    }
  }
}

// Bisection on the sign of Re(lambda) of the tracked eigenvalue.
void refine_crossing_bracket(const MatrixFamily& family, double tol,
                             double& lo, double& hi, Complex ref,
                             bool lo_stable) {
  for (int depth = 0; depth < 60; ++depth) {
    double mid = 0.5 * (lo + hi);
    EigenStructure eig;
    try {
      eig = eigendecompose(family(mid), tol);
    } catch (const NonSimpleSpectrum&) {
      return;
    }
    int best = 0;
    double bd = kInf;
    for (int m = 0; m < eig.n(); ++m) {
      double d = std::abs(eig.lambdas(m) - ref);
      if (d < bd) {
        bd = d;
        best = m;
      }
    }
    Complex lm = eig.lambdas(best);
    // Stop once localized; [lo, hi] still straddles the sign change.
    if (std::abs(lm.real()) < 1e-8) return;
    if ((lm.real() < 0.0) == lo_stable)
      lo = mid;
    else
      hi = mid;
    ref = lm;
  }
}

}  // namespace

std::vector<Event> detect_events(const SweepConfig& cfg,
                                 const SweepResult& result) {
  std::vector<Event> events;
  std::vector<const SweepPoint*> valid;
  for (const auto& pt : result.points)
    if (pt.valid) valid.push_back(&pt);
  if (valid.size() < 2) return events;
  const int n = valid.front()->eig.n();

  // MERGE / SPLIT: two real tracks become one conjugate pair, or reverse.
  for (std::size_t s = 1; s < valid.size(); ++s) {
    const SweepPoint& pa = *valid[s - 1];
    const SweepPoint& pb = *valid[s];
    for (int t1 = 0; t1 < n; ++t1) {
      for (int t2 = t1 + 1; t2 < n; ++t2) {
        int a1 = pa.track_to_mode[t1], a2 = pa.track_to_mode[t2];
        int b1 = pb.track_to_mode[t1], b2 = pb.track_to_mode[t2];
        bool real_a = mode_is_real(pa.eig, a1) && mode_is_real(pa.eig, a2);
        bool real_b = mode_is_real(pb.eig, b1) && mode_is_real(pb.eig, b2);
        bool pair_a = pa.eig.conj_pair[a1] == a2 && !mode_is_real(pa.eig, a1);
        bool pair_b = pb.eig.conj_pair[b1] == b2 && !mode_is_real(pb.eig, b1);
        if (real_a && pair_b) {
          Event ev{Event::Kind::Merge, pa.gamma, pb.gamma, {t1, t2}};
          int lo_real = 0;
          for (int m = 0; m < n; ++m)
            if (mode_is_real(pa.eig, m)) ++lo_real;
          refine_merge_bracket(cfg.family, cfg.eig_tol, ev.gamma_lo,
                               ev.gamma_hi, lo_real);
          events.push_back(std::move(ev));
        } else if (pair_a && real_b) {
          Event ev{Event::Kind::Split, pa.gamma, pb.gamma, {t1, t2}};
          int lo_real = 0;
          for (int m = 0; m < n; ++m)
            if (mode_is_real(pa.eig, m)) ++lo_real;
          refine_merge_bracket(cfg.family, cfg.eig_tol, ev.gamma_lo,
                               ev.gamma_hi, lo_real);
          events.push_back(std::move(ev));
        }
      }
    }
  }

  // INSTABILITY / RESTABILIZATION: per-track sign change of Re(lambda).
  for (int t = 0; t < n; ++t) {
    for (std::size_t s = 1; s < valid.size(); ++s) {
      const SweepPoint& pa = *valid[s - 1];
      const SweepPoint& pb = *valid[s];
      double ra = pa.eig.lambdas(pa.track_to_mode[t]).real();
      double rb = pb.eig.lambdas(pb.track_to_mode[t]).real();
      if (ra < 0.0 && rb >= 0.0) {
        Event ev{Event::Kind::Instability, pa.gamma, pb.gamma, {t}};
        refine_crossing_bracket(cfg.family, cfg.eig_tol, ev.gamma_lo,
                                ev.gamma_hi,
                                pa.eig.lambdas(pa.track_to_mode[t]), true);
        events.push_back(std::move(ev));
      } else if (ra >= 0.0 && rb < 0.0) {
        Event ev{Event::Kind::Restabilization, pa.gamma, pb.gamma, {t}};
        refine_crossing_bracket(cfg.family, cfg.eig_tol, ev.gamma_lo,
                                ev.gamma_hi,
                                pa.eig.lambdas(pa.track_to_mode[t]), false);
        events.push_back(std::move(ev));
      }
    }
  }

  // RESONANCE: local maximum of the averaged |LMIE| over gamma for an
  // oscillatory pair under the small-damping condition.
  for (int t1 = 0; t1 < n; ++t1) {
    for (int t2 = t1 + 1; t2 < n; ++t2) {
      std::vector<double> f(valid.size(), kNan);
      for (std::size_t s = 0; s < valid.size(); ++s) {
        const SweepPoint& pt = *valid[s];
        int m1 = pt.track_to_mode[t1], m2 = pt.track_to_mode[t2];
        Complex l1 = pt.eig.lambdas(m1), l2 = pt.eig.lambdas(m2);
        // representatives only: both oscillatory with +Im
        if (l1.imag() <= 0.0 || l2.imag() <= 0.0) continue;
        if (l1.real() >= 0.0 || l2.real() >= 0.0) continue;
        try {
          f[s] = std::abs(lmie_averaged(pt.eig, m1, m2));
        } catch (const DivergentPair&) {
        }
      }
      for (std::size_t s = 1; s + 1 < valid.size(); ++s) {
        if (!std::isfinite(f[s]) || !std::isfinite(f[s - 1]) ||
            !std::isfinite(f[s + 1]))
          continue;
        if (!(f[s] > f[s - 1] && f[s] > f[s + 1])) continue;
        const SweepPoint& pt = *valid[s];
        Complex l1 = pt.eig.lambdas(pt.track_to_mode[t1]);
        Complex l2 = pt.eig.lambdas(pt.track_to_mode[t2]);
        double alpha = -l1.real() - l2.real();
        double omega = l1.imag() + l2.imag();
        if (alpha >= 0.2 * omega) continue;  // damping not small
        Event ev{Event::Kind::Resonance, valid[s - 1]->gamma,
                 valid[s + 1]->gamma, {t1, t2},
                 std::abs(l1.imag() - l2.imag())};
        events.push_back(std::move(ev));
      }
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) {
                     return a.gamma_lo < b.gamma_lo;
                   });
  return events;
}

}  // namespace lma
