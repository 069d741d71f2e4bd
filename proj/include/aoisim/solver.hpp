#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aoisim/topology.hpp"

namespace aoisim {

// Point in the relaxed scheduling polytope; component order is canonical
// (link index, then flow index) over all on-path (link, flow) pairs.
struct RelaxedScheduleVector {
  std::vector<double> values;
};

// Fractional relaxation of the feasible-schedule set: box [0,1] per component,
// per-link flow mass <= 1, per-conflict-set mass <= 1.
struct SchedulingPolytope {
  std::vector<std::pair<int, int>> components;  // (link, flow), canonical order
  std::vector<std::vector<int>> cap_sets;       // component-index sets with sum <= 1

  int num_components() const { return static_cast<int>(components.size()); }

  bool feasible(const RelaxedScheduleVector& s, double tol = 1e-9) const {
    for (double v : s.values)
      if (v < -tol || v > 1.0 + tol) return false;
    for (const auto& set : cap_sets) {
      double sum = 0.0;
      for (int k : set) sum += s.values[k];
      if (sum > 1.0 + tol) return false;
    }
    return true;
  }
};

inline SchedulingPolytope build_polytope(const NetworkTopology& topo) {
  SchedulingPolytope p;
  std::vector<std::vector<int>> comp_of_link(topo.links.size());
  for (int l = 0; l < static_cast<int>(topo.links.size()); ++l)
    for (int f : topo.link_flows[l]) {
      comp_of_link[l].push_back(p.num_components());
      p.components.push_back({l, f});
    }
  for (int l = 0; l < static_cast<int>(topo.links.size()); ++l)
    if (comp_of_link[l].size() >= 2) p.cap_sets.push_back(comp_of_link[l]);
  for (const auto& cset : topo.conflict_sets) {
    std::vector<int> comps;
    for (int l : cset)
      for (int k : comp_of_link[l]) comps.push_back(k);
    if (comps.size() >= 2) p.cap_sets.push_back(std::move(comps));
  }
  return p;
}

struct SolverConfig {
  double alpha = 1e-3;   // step size
  int max_sweeps = 400;  // full cycles through the component list
  bool verbatim_iterate = false;  // multiply the increment by the current component value
  double w_bar = 2.0;    // weight bound (1 + beta)
  double r_bar = 1.0;    // rate bound (on/off channel)
};

// Suboptimality gap certificate: alpha * w_bar^2 * r_bar^2 * |K| * (4|K|+1) / 2.
inline double lemma1_gap(const SolverConfig& cfg, int num_components) {
  double k = static_cast<double>(num_components);
  return cfg.alpha * cfg.w_bar * cfg.w_bar * cfg.r_bar * cfg.r_bar * k * (4.0 * k + 1.0) / 2.0;
}

inline double objective_F(const std::vector<double>& theta, const RelaxedScheduleVector& s) {
  double total = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) total += theta[k] * s.values[k];
  return total;
}

// Euclidean projection onto the polytope via Dykstra's cyclic scheme over the
// box and the individual cap half-spaces, iterated to a 1e-9 infinity-norm
// fixed point.
inline RelaxedScheduleVector project(const RelaxedScheduleVector& s,
                                     const SchedulingPolytope& p, double tol = 1e-9) {
  const int n = static_cast<int>(s.values.size());
  const int m = static_cast<int>(p.cap_sets.size());
  RelaxedScheduleVector x = s;
  std::vector<double> box_corr(n, 0.0);
  std::vector<std::vector<double>> cap_corr(m);
  for (int c = 0; c < m; ++c) cap_corr[c].assign(p.cap_sets[c].size(), 0.0);

  for (int iter = 0; iter < 10000; ++iter) {
    double change = 0.0;
    // Box constraint.
    for (int k = 0; k < n; ++k) {
      double y = x.values[k] + box_corr[k];
      double z = std::clamp(y, 0.0, 1.0);
      box_corr[k] = y - z;
      change = std::max(change, std::abs(z - x.values[k]));
      x.values[k] = z;
    }
    // Each cap half-space: sum over the set <= 1.
    for (int c = 0; c < m; ++c) {
      const auto& set = p.cap_sets[c];
      double sum = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i) sum += x.values[set[i]] + cap_corr[c][i];
      double over = (sum - 1.0) / static_cast<double>(set.size());
      for (std::size_t i = 0; i < set.size(); ++i) {
        double y = x.values[set[i]] + cap_corr[c][i];
        double z = over > 0.0 ? y - over : y;
        cap_corr[c][i] = y - z;
        change = std::max(change, std::abs(z - x.values[set[i]]));
        x.values[set[i]] = z;
      }
    }
    if (change < tol && p.feasible(x, tol)) break;
  }
  return x;
}

// Incremental gradient ascent on F with cyclic per-component updates and
// projection after every increment; returns the best iterate seen.
inline RelaxedScheduleVector igd_solve(const std::vector<double>& theta,
                                       const SchedulingPolytope& p, const SolverConfig& cfg) {
  if (cfg.alpha <= 0.0) throw std::invalid_argument("igd_solve: alpha must be positive");
  const int n = p.num_components();
  if (static_cast<int>(theta.size()) != n)
    throw std::invalid_argument("igd_solve: theta size mismatch");

  std::size_t max_cap = 1;
  for (const auto& set : p.cap_sets) max_cap = std::max(max_cap, set.size());
  RelaxedScheduleVector s;
  s.values.assign(n, 1.0 / (1.0 + static_cast<double>(max_cap)));  // interior start

  RelaxedScheduleVector best = s;
  double best_f = objective_F(theta, s);
  int stagnant = 0;
  for (int sweep = 0; sweep < cfg.max_sweeps && stagnant < 50; ++sweep) {
    for (int k = 0; k < n; ++k) {
      double inc = cfg.alpha * theta[k];
      if (cfg.verbatim_iterate) inc *= s.values[k];
      if (inc == 0.0) continue;
      s.values[k] += inc;
      if (!p.feasible(s)) s = project(s, p);
    }
    double f = objective_F(theta, s);
    if (f > best_f) {
      best_f = f;
      best = s;
      stagnant = 0;
    } else {
      ++stagnant;  // limit cycle reached; further sweeps cannot improve
    }
  }
  return best;
}

// Greedy rounding: descending by fractional value (theta, then canonical order,
// as tie-breakers), activating a component whenever feasibility is preserved.
inline Schedule round_to_schedule(const NetworkTopology& topo, const SchedulingPolytope& p,
                                  const RelaxedScheduleVector& s,
                                  const std::vector<double>& theta) {
  std::vector<int> order(p.num_components());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (s.values[a] != s.values[b]) return s.values[a] > s.values[b];
    return theta[a] > theta[b];
  });
  Schedule sched(topo.links.size());
  std::vector<int> active_links;
  for (int k : order) {
    if (s.values[k] <= 0.0) continue;
    auto [l, f] = p.components[k];
    if (sched.link_flow[l] >= 0) continue;
    bool ok = true;
    for (int a : active_links)
      if (topo.links_conflict(a, l)) ok = false;
    if (!ok) continue;
    sched.link_flow[l] = f;
    active_links.push_back(l);
  }
  return sched;
}

}  // namespace aoisim
