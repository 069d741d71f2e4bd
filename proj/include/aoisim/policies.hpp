#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoisim/sim_core.hpp"
#include "aoisim/stochastic.hpp"
#include "aoisim/topology.hpp"

namespace aoisim {

enum class PolicyKind {
  Sdspd,         // age-weighted queue objective + dropping
  BpD,           // differential backlog + dropping
  SdspndFcfs,    // SDSPD objective, no dropping, FCFS service
  SdspndLcfs,    // SDSPD objective, no dropping, LCFS service
  BpFcfs,
  BpLcfs,
  StationaryRandom,  // fixed schedule distribution, state-oblivious
};

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Sdspd: return "SDSPD";
    case PolicyKind::BpD: return "BP-D";
    case PolicyKind::SdspndFcfs: return "SDSPnD-FCFS";
    case PolicyKind::SdspndLcfs: return "SDSPnD-LCFS";
    case PolicyKind::BpFcfs: return "BP-FCFS";
    case PolicyKind::BpLcfs: return "BP-LCFS";
    case PolicyKind::StationaryRandom: return "StationaryRandom";
  }
  return "?";
}

inline PolicyKind policy_from_name(const std::string& s) {
  for (PolicyKind k : {PolicyKind::Sdspd, PolicyKind::BpD, PolicyKind::SdspndFcfs,
                       PolicyKind::SdspndLcfs, PolicyKind::BpFcfs, PolicyKind::BpLcfs,
                       PolicyKind::StationaryRandom})
    if (s == policy_name(k)) return k;
  throw std::invalid_argument("unknown policy: " + s);
}

inline Discipline discipline_for(PolicyKind k) {
  switch (k) {
    case PolicyKind::SdspndFcfs:
    case PolicyKind::BpFcfs: return Discipline::Fcfs;
    case PolicyKind::SdspndLcfs:
    case PolicyKind::BpLcfs: return Discipline::Lcfs;
    default: return Discipline::DropFreshestOnly;  // SDSPD, BP-D, StationaryRandom
  }
}

inline bool uses_backpressure(PolicyKind k) {
  return k == PolicyKind::BpD || k == PolicyKind::BpFcfs || k == PolicyKind::BpLcfs;
}

enum class TieBreak { Lexicographic, SeededRandom };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Sdspd;
  double beta = 1.0;  // priority bump once a flow exceeds its age target
  TieBreak tie_break = TieBreak::Lexicographic;
};

// Age-threshold weight: 1 below the target, 1+beta at or above it. A flow
// without a target always weighs 1.
inline double weight(double age, double target, double beta) {
  return age < target ? 1.0 : 1.0 + beta;
}

// theta(i,j,f) = w^f(age) * Q_i^f(t) * H_ij for one (link, flow) pair.
inline double objective_term(const NetworkTopology& topo, const SimState& state,
                             const std::vector<uint8_t>& channel, long long t, int link,
                             int flow, const PolicyConfig& cfg) {
  if (!channel[link]) return 0.0;
  int hop = topo.hop_of[flow][link];
  if (hop < 0) return 0.0;
  int q = state.eligible_count(flow, hop, t);
  if (q == 0) return 0.0;
  double w = weight(static_cast<double>(state.age(flow, t)), topo.flows[flow].age_target,
                    cfg.beta);
  return w * q;
}

// Objective of a full schedule under the SDSPD rule.
inline double sdspd_objective(const NetworkTopology& topo, const Schedule& s,
                              const SimState& state, const std::vector<uint8_t>& channel,
                              long long t, const PolicyConfig& cfg) {
  double total = 0.0;
  for (int l = 0; l < static_cast<int>(topo.links.size()); ++l)
    if (s.link_flow[l] >= 0)
      total += objective_term(topo, state, channel, t, l, s.link_flow[l], cfg);
  return total;
}

// Differential backlog of a link: max_f (Q_i^f - Q_j^f)^+ with the destination
// queue taken as 0. Ties go to the lexicographically first flow.
inline std::pair<long long, int> bp_link_weight(const NetworkTopology& topo,
                                                const SimState& state, long long t, int link) {
  long long best = 0;
  int best_flow = -1;
  for (int f : topo.link_flows[link]) {
    int hop = topo.hop_of[f][link];
    long long qi = state.eligible_count(f, hop, t);
    long long qj = 0;
    if (hop + 1 < static_cast<int>(topo.flows[f].path.size()) - 1)
      qj = state.eligible_count(f, hop + 1, t);
    long long diff = qi - qj;
    if (diff < 0) diff = 0;
    if (best_flow < 0 || diff > best) {
      best = diff;
      best_flow = f;
    }
  }
  return {best, best_flow};
}

// Argmax of the policy objective over the feasible schedules. Nonnegative
// per-link values mean the optimum is attained at a maximal link set, so the
// search runs over the precomputed maximal sets; zero-value activations are
// then trimmed (canonical tie-break prefers fewer of them, and an all-zero
// slot yields the empty schedule).
inline Schedule choose_schedule(const NetworkTopology& topo, const PolicyConfig& cfg,
                                const SimState& state, const std::vector<uint8_t>& channel,
                                long long t, RngStream* tie_rng = nullptr) {
  const int E = static_cast<int>(topo.links.size());
  std::vector<double> link_val(E, 0.0);
  std::vector<int> link_best_flow(E, -1);

  const bool random_ties = cfg.tie_break == TieBreak::SeededRandom && tie_rng;
  for (int l = 0; l < E; ++l) {
    double best = 0.0;
    int best_flow = -1;
    int ties = 0;
    for (int f : topo.link_flows[l]) {
      double v;
      if (uses_backpressure(cfg.kind)) {
        int hop = topo.hop_of[f][l];
        long long qi = state.eligible_count(f, hop, t);
        long long qj = hop + 1 < static_cast<int>(topo.flows[f].path.size()) - 1
                           ? state.eligible_count(f, hop + 1, t)
                           : 0;
        v = channel[l] ? static_cast<double>(std::max(qi - qj, 0ll)) : 0.0;
      } else {
        v = objective_term(topo, state, channel, t, l, f, cfg);
      }
      if (best_flow < 0 || v > best) {
        best = v;
        best_flow = f;
        ties = 1;
      } else if (v == best) {
        ++ties;
        // Equal-value flows are schedule-level ties too; resolve per config.
        if (random_ties && tie_rng->uniform_int(ties) == 0) best_flow = f;
      }
    }
    link_val[l] = best;
    link_best_flow[l] = best_flow;
  }

  int best_set = -1;
  double best_sum = -1.0;
  int num_ties = 0;
  for (int i = 0; i < static_cast<int>(topo.maximal_link_sets.size()); ++i) {
    double sum = 0.0;
    for (int l : topo.maximal_link_sets[i]) sum += link_val[l];
    if (best_set < 0 || sum > best_sum) {
      best_set = i;
      best_sum = sum;
      num_ties = 1;
    } else if (sum == best_sum) {
      ++num_ties;
      // Reservoir draw keeps each tied set equally likely under seeded-random.
      if (cfg.tie_break == TieBreak::SeededRandom && tie_rng &&
          tie_rng->uniform_int(num_ties) == 0)
        best_set = i;
    }
  }

  Schedule s(E);
  if (best_set >= 0) {
    for (int l : topo.maximal_link_sets[best_set])
      if (link_val[l] > 0.0) s.link_flow[l] = link_best_flow[l];
  }
  return s;
}

// Fixed distribution over feasible link sets; the per-slot draw is independent
// of queues, channel, and age. When a sampled link carries several flows, one
// is drawn uniformly.
struct StationaryDistribution {
  std::vector<std::vector<int>> link_sets;  // support (may include the empty set)
  std::vector<double> probs;                // same length, sums to 1
};

inline Schedule stationary_schedule(const NetworkTopology& topo,
                                    const StationaryDistribution& dist, RngStream& rng) {
  double u = rng.uniform();
  std::size_t pick = dist.link_sets.size() - 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  Schedule s(topo.links.size());
  for (int l : dist.link_sets[pick]) {
    const auto& fl = topo.link_flows[l];
    s.link_flow[l] = fl.size() == 1 ? fl[0] : fl[rng.uniform_int(fl.size())];
  }
  return s;
}

// Pilot run used by the stationary-distribution surrogate: total average age
// across flows after `slots` slots under the given distribution.
inline double stationary_pilot_score(const NetworkTopology& topo,
                                     const StationaryDistribution& dist, double q,
                                     long long slots, uint64_t pilot_seed) {
  SimState state(topo, Discipline::DropFreshestOnly);
  RngStream ch(pilot_seed, 0, Substream::Channel);
  RngStream ar(pilot_seed, 0, Substream::Arrivals);
  RngStream st(pilot_seed, 0, Substream::Stationary);
  ChannelModel cm{q};
  for (long long t = 0; t < slots; ++t) {
    auto arrivals = sample_arrivals(topo.flows, ar);
    auto channel = sample_channel_state(cm, ch, topo.links.size());
    state.apply_arrivals(arrivals, t);
    Schedule s = stationary_schedule(topo, dist, st);
    StepOutcome out;
    state.serve(s, channel, t, out);
    state.finish_slot(out, t);
  }
  double total = 0.0;
  for (std::size_t f = 0; f < topo.flows.size(); ++f)
    total += average_age(state.tracker(f), slots);
  return total;
}

// Surrogate for the offline stationary-policy optimization: coordinate descent
// on the probability simplex over maximal link sets, scored by a short pilot
// simulation with a fixed seed. Deterministic given topology and pilot seed.
inline StationaryDistribution optimize_stationary_distribution(
    const NetworkTopology& topo, double q, long long pilot_slots = 1000,
    uint64_t pilot_seed = 0x5eedull) {
  if (topo.maximal_link_sets.empty())
    throw std::invalid_argument("optimize_stationary_distribution: no feasible schedules");
  StationaryDistribution dist;
  dist.link_sets = topo.maximal_link_sets;
  const std::size_t m = dist.link_sets.size();
  dist.probs.assign(m, 1.0 / static_cast<double>(m));

  double score = stationary_pilot_score(topo, dist, q, pilot_slots, pilot_seed);
  const double kMinGain = 0.02;  // relative improvement needed to accept a move
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (std::size_t i = 0; i < m; ++i) {
      for (double gamma : {0.25, 0.1}) {
        StationaryDistribution cand = dist;
        for (std::size_t j = 0; j < m; ++j) cand.probs[j] *= (1.0 - gamma);
        cand.probs[i] += gamma;
        double cs = stationary_pilot_score(topo, cand, q, pilot_slots, pilot_seed);
        if (cs < score * (1.0 - kMinGain)) {
          dist = cand;
          score = cs;
        }
      }
    }
  }
  return dist;
}

}  // namespace aoisim
