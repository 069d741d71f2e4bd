#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoisim/policies.hpp"
#include "aoisim/sim_core.hpp"
#include "aoisim/solver.hpp"
#include "aoisim/stochastic.hpp"
#include "aoisim/topology.hpp"

namespace aoisim {

enum class SchedulerKind { Exhaustive, Distributed };

struct ExperimentConfig {
  TopologySpec topo_spec;
  double q = 0.5;
  PolicyConfig policy;
  long long slots = 10000;
  int trials = 100;
  uint64_t seed = 1;
  SchedulerKind scheduler = SchedulerKind::Exhaustive;
  SolverConfig solver;
  std::string label;  // row label override; defaults to the policy name
};

struct TrialResult {
  std::vector<double> avg_age;  // per flow, slots
  std::vector<long long> delivered;
  std::vector<long long> dropped;
};

struct SummaryRow {
  std::string flow;
  double rate = 0.0;
  double mean_aoi = 0.0;
  double std_aoi = 0.0;
  double lower_bound = 0.0;
};

struct SummaryTable {
  std::string policy;
  long long slots = 0;
  int trials = 0;
  uint64_t seed = 0;
  std::vector<SummaryRow> rows;  // flow declaration order
};

// Single-flow age floor: Bernoulli sampling age plus n expected channel waits.
inline double lower_bound(double p, double q, int hops) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("lower_bound: p must be in (0,1]");
  if (q <= 0.0 || q > 1.0) throw std::invalid_argument("lower_bound: q must be in (0,1]");
  if (hops < 0) throw std::invalid_argument("lower_bound: hops must be >= 0");
  return (2.0 - p) / (2.0 * p) + static_cast<double>(hops) / q;
}

// Built-once state shared across the trials of one experiment.
struct ExperimentContext {
  ExperimentConfig config;
  NetworkTopology topo;
  SchedulingPolytope polytope;           // distributed scheduler only
  StationaryDistribution stationary;     // StationaryRandom only

  explicit ExperimentContext(const ExperimentConfig& cfg) : config(cfg) {
    topo = validate_and_build(cfg.topo_spec);
    if (cfg.scheduler == SchedulerKind::Distributed) polytope = build_polytope(topo);
    if (cfg.policy.kind == PolicyKind::StationaryRandom)
      stationary = optimize_stationary_distribution(topo, cfg.q);
  }
};

namespace detail {

inline Schedule distributed_choose(const ExperimentContext& ctx, const SimState& state,
                                   const std::vector<uint8_t>& channel, long long t) {
  const auto& p = ctx.polytope;
  std::vector<double> theta(p.num_components());
  for (int k = 0; k < p.num_components(); ++k) {
    auto [l, f] = p.components[k];
    theta[k] = uses_backpressure(ctx.config.policy.kind)
                   ? (channel[l] ? static_cast<double>(bp_link_weight(ctx.topo, state, t, l).first)
                                 : 0.0)
                   : objective_term(ctx.topo, state, channel, t, l, f, ctx.config.policy);
  }
  auto s = igd_solve(theta, p, ctx.config.solver);
  return round_to_schedule(ctx.topo, p, s, theta);
}

}  // namespace detail

// Per-slot debug trace: one record per slot per flow with the age at the slot
// boundary and the buffer occupancy along the path.
inline TrialResult run_trial(const ExperimentContext& ctx, int trial,
                             std::ostream* trace = nullptr) {
  const auto& cfg = ctx.config;
  const auto& topo = ctx.topo;
  SimState state(topo, discipline_for(cfg.policy.kind));
  RngStream ch(cfg.seed, trial, Substream::Channel);
  RngStream ar(cfg.seed, trial, Substream::Arrivals);
  RngStream tie(cfg.seed, trial, Substream::TieBreak);
  RngStream stat(cfg.seed, trial, Substream::Stationary);
  ChannelModel cm{cfg.q};

  for (long long t = 0; t < cfg.slots; ++t) {
    auto arrivals = sample_arrivals(topo.flows, ar);
    auto channel = sample_channel_state(cm, ch, topo.links.size());
    state.apply_arrivals(arrivals, t);
    Schedule s(topo.links.size());
    if (cfg.policy.kind == PolicyKind::StationaryRandom)
      s = stationary_schedule(topo, ctx.stationary, stat);
    else if (cfg.scheduler == SchedulerKind::Distributed)
      s = detail::distributed_choose(ctx, state, channel, t);
    else
      s = choose_schedule(topo, cfg.policy, state, channel, t, &tie);
    StepOutcome out;
    state.serve(s, channel, t, out);
    state.finish_slot(out, t);
    if (trace) {
      if (t == 0) *trace << "t,flow,age,queues\n";
      for (std::size_t f = 0; f < topo.flows.size(); ++f) {
        *trace << t << ',' << topo.flows[f].id << ',' << state.tracker(f).current_age << ',';
        for (std::size_t h = 0; h + 1 < topo.flows[f].path.size(); ++h)
          *trace << (h ? ";" : "") << state.buffer(static_cast<int>(f), static_cast<int>(h)).size();
        *trace << '\n';
      }
    }
  }

  TrialResult r;
  for (std::size_t f = 0; f < topo.flows.size(); ++f) {
    r.avg_age.push_back(average_age(state.tracker(f), cfg.slots));
    r.delivered.push_back(state.delivered_count(f));
    r.dropped.push_back(state.dropped_count(f));
  }
  return r;
}

inline TrialResult run_trial(const ExperimentConfig& cfg, int trial) {
  return run_trial(ExperimentContext(cfg), trial);
}

inline SummaryTable summarize(const ExperimentContext& ctx,
                              const std::vector<TrialResult>& trials) {
  const auto& topo = ctx.topo;
  SummaryTable table;
  table.policy =
      ctx.config.label.empty() ? policy_name(ctx.config.policy.kind) : ctx.config.label;
  table.slots = ctx.config.slots;
  table.trials = static_cast<int>(trials.size());
  table.seed = ctx.config.seed;
  for (std::size_t f = 0; f < topo.flows.size(); ++f) {
    double sum = 0.0, sq = 0.0;
    for (const auto& tr : trials) {
      sum += tr.avg_age[f];
      sq += tr.avg_age[f] * tr.avg_age[f];
    }
    double n = static_cast<double>(trials.size());
    double mean = sum / n;
    double var = n > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
    SummaryRow row;
    row.flow = topo.flows[f].id;
    row.rate = topo.flows[f].arrival_rate;
    row.mean_aoi = mean;
    row.std_aoi = std::sqrt(var);
    // A flow that never samples (p = 0) or never transmits (q = 0) has no
    // finite age floor.
    row.lower_bound =
        (topo.flows[f].arrival_rate > 0.0 && ctx.config.q > 0.0)
            ? lower_bound(topo.flows[f].arrival_rate, ctx.config.q,
                          static_cast<int>(topo.flow_links[f].size()))
            : std::numeric_limits<double>::infinity();
    table.rows.push_back(row);
  }
  return table;
}

inline SummaryTable run_experiment(const ExperimentConfig& cfg) {
  ExperimentContext ctx(cfg);
  std::vector<TrialResult> trials;
  trials.reserve(cfg.trials);
  for (int i = 0; i < cfg.trials; ++i) trials.push_back(run_trial(ctx, i));
  return summarize(ctx, trials);
}

// ---- Output emission ----

inline std::string to_csv(const std::vector<SummaryTable>& tables) {
  std::ostringstream os;
  os << "flow,policy,rate,mean_aoi,std_aoi,lower_bound\n";
  os << std::setprecision(10);
  for (const auto& t : tables)
    for (const auto& r : t.rows)
      os << r.flow << ',' << t.policy << ',' << r.rate << ',' << r.mean_aoi << ','
         << r.std_aoi << ',' << r.lower_bound << '\n';
  return os.str();
}

inline std::string to_text(const std::vector<SummaryTable>& tables) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  if (tables.empty()) return "";
  os << std::setw(18) << std::left << "policy";
  for (const auto& r : tables.front().rows) os << std::setw(10) << std::right << r.flow;
  os << '\n';
  os << std::setw(18) << std::left << "Lower Bound";
  for (const auto& r : tables.front().rows) os << std::setw(10) << std::right << r.lower_bound;
  os << '\n';
  for (const auto& t : tables) {
    os << std::setw(18) << std::left << t.policy;
    for (const auto& r : t.rows) os << std::setw(10) << std::right << r.mean_aoi;
    os << '\n';
  }
  return os.str();
}

inline void emit_outputs(const std::vector<SummaryTable>& tables, const std::string& out_dir,
                         const std::string& stem) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
  };
  write(out_dir + "/" + stem + ".csv", to_csv(tables));
  write(out_dir + "/" + stem + ".txt", to_text(tables));
}

// ---- Configuration file ----

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  TopologySpec& spec = cfg.topo_spec;
  if (j.contains("network")) {
    spec = builtin_network(j.at("network").get<int>());
    if (j.contains("rate"))
      for (auto& f : spec.flows) f.arrival_rate = j.at("rate").get<double>();
  }
  if (j.contains("nodes")) spec.nodes = j.at("nodes").get<std::vector<NodeId>>();
  if (j.contains("edges")) {
    spec.declared_edges.clear();
    for (const auto& e : j.at("edges"))
      spec.declared_edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
  }
  if (j.contains("flows")) {
    spec.flows.clear();
    for (const auto& jf : j.at("flows")) {
      Flow f;
      f.id = jf.at("id").get<std::string>();
      f.path = jf.at("path").get<std::vector<NodeId>>();
      f.arrival_rate = jf.at("rate").get<double>();
      if (jf.contains("target") && !jf.at("target").is_null())
        f.age_target = jf.at("target").get<double>();
      spec.flows.push_back(f);
    }
  }
  if (j.contains("targets")) {  // per-flow override, null = no target
    const auto& tg = j.at("targets");
    for (std::size_t i = 0; i < spec.flows.size() && i < tg.size(); ++i)
      if (!tg[i].is_null()) spec.flows[i].age_target = tg[i].get<double>();
  }
  if (j.contains("interference")) {
    const auto& itf = j.at("interference");
    if (itf.is_string()) {
      if (itf.get<std::string>() != "node-exclusive")
        throw std::invalid_argument("unknown interference mode: " + itf.get<std::string>());
      spec.interference = InterferenceMode::NodeExclusive;
    } else {
      spec.interference = InterferenceMode::ExplicitSets;
      for (const auto& set : itf) {
        std::vector<Link> links;
        for (const auto& e : set) links.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
        spec.explicit_conflict_sets.push_back(std::move(links));
      }
    }
  }
  if (j.contains("channel")) cfg.q = j.at("channel").at("q").get<double>();
  if (j.contains("policy")) cfg.policy.kind = policy_from_name(j.at("policy").get<std::string>());
  if (j.contains("beta")) cfg.policy.beta = j.at("beta").get<double>();
  if (j.contains("tie_break")) {
    auto s = j.at("tie_break").get<std::string>();
    if (s == "lexicographic") cfg.policy.tie_break = TieBreak::Lexicographic;
    else if (s == "seeded-random") cfg.policy.tie_break = TieBreak::SeededRandom;
    else throw std::invalid_argument("unknown tie_break: " + s);
  }
  if (j.contains("slots")) cfg.slots = j.at("slots").get<long long>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("scheduler")) {
    auto s = j.at("scheduler").get<std::string>();
    if (s == "exhaustive") cfg.scheduler = SchedulerKind::Exhaustive;
    else if (s == "distributed") cfg.scheduler = SchedulerKind::Distributed;
    else throw std::invalid_argument("unknown scheduler: " + s);
  }
  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    if (js.contains("alpha")) cfg.solver.alpha = js.at("alpha").get<double>();
    if (js.contains("sweeps")) cfg.solver.max_sweeps = js.at("sweeps").get<int>();
    if (js.contains("iterate")) {
      auto s = js.at("iterate").get<std::string>();
      if (s == "gradient") cfg.solver.verbatim_iterate = false;
      else if (s == "verbatim") cfg.solver.verbatim_iterate = true;
      else throw std::invalid_argument("unknown solver.iterate: " + s);
    }
  }
  cfg.solver.w_bar = 1.0 + cfg.policy.beta;
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  f >> j;
  return config_from_json(j);
}

// ---- Bundled experiment tables ----
//
// 1: network 1, rate 0.10, all seven policies
// 2: network 1, rate 0.13, all seven policies
// 3: network 1, rate 0.14, all seven policies
// 4: network 2, rate 0.10, all seven policies
// 5: network 1, rate 0.14, SDSPD with the five age-target rows
// 6: network 2, rate 0.13, all seven policies

inline std::vector<ExperimentConfig> table_configs(int table, long long slots = 10000,
                                                   int trials = 100, uint64_t seed = 1) {
  auto base = [&](int network, double rate) {
    ExperimentConfig cfg;
    cfg.topo_spec = builtin_network(network);
    for (auto& f : cfg.topo_spec.flows) f.arrival_rate = rate;
    cfg.slots = slots;
    cfg.trials = trials;
    cfg.seed = seed;
    // Randomized tie-breaks keep the presets from systematically favoring
    // low-numbered links and flows on argmax ties.
    cfg.policy.tie_break = TieBreak::SeededRandom;
    return cfg;
  };
  const std::vector<PolicyKind> all = {
      PolicyKind::Sdspd,      PolicyKind::BpD,    PolicyKind::SdspndLcfs,
      PolicyKind::SdspndFcfs, PolicyKind::BpLcfs, PolicyKind::BpFcfs,
      PolicyKind::StationaryRandom};

  std::vector<ExperimentConfig> out;
  auto add_all = [&](int network, double rate) {
    for (PolicyKind k : all) {
      auto cfg = base(network, rate);
      cfg.policy.kind = k;
      out.push_back(cfg);
    }
  };
  switch (table) {
    case 1: add_all(1, 0.10); break;
    case 2: add_all(1, 0.13); break;
    case 3: add_all(1, 0.14); break;
    case 4: add_all(2, 0.10); break;
    case 5: {
      const double inf = kNoAgeTarget;
      const std::vector<std::vector<double>> target_rows = {
          {inf, inf, inf, inf, inf},
          {18, inf, inf, inf, inf},
          {15, inf, inf, inf, inf},
          {15, inf, inf, inf, 11},
          {inf, 16, inf, inf, 12},
      };
      for (const auto& targets : target_rows) {
        auto cfg = base(1, 0.14);
        cfg.policy.kind = PolicyKind::Sdspd;
        std::string label = "SDSPD ";
        for (std::size_t i = 0; i < targets.size(); ++i) {
          cfg.topo_spec.flows[i].age_target = targets[i];
          label += (i ? "-" : "");
          label += std::isinf(targets[i]) ? "*" : std::to_string(static_cast<int>(targets[i]));
        }
        cfg.label = label;
        out.push_back(cfg);
      }
      break;
    }
    case 6: add_all(2, 0.13); break;
    default: throw std::invalid_argument("unknown table " + std::to_string(table));
  }
  return out;
}

}  // namespace aoisim
