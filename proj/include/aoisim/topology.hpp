#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoisim {

using NodeId = int;
using Link = std::pair<NodeId, NodeId>;  // directed (tx, rx)

inline constexpr double kNoAgeTarget = std::numeric_limits<double>::infinity();

struct Flow {
  std::string id;
  NodeId src = 0;
  NodeId des = 0;
  std::vector<NodeId> path;      // src ... des, length >= 2
  double arrival_rate = 0.0;     // Bernoulli per-slot probability
  double age_target = kNoAgeTarget;
};

enum class InterferenceMode { NodeExclusive, ExplicitSets };

// Raw description of a network, as read from a config file or a builtin.
struct TopologySpec {
  std::vector<NodeId> nodes;                 // optional; derived from paths if empty
  std::vector<Link> declared_edges;          // optional undirected adjacency, for path validation
  std::vector<Flow> flows;
  InterferenceMode interference = InterferenceMode::NodeExclusive;
  std::vector<std::vector<Link>> explicit_conflict_sets;  // used when interference == ExplicitSets
};

// Per-slot link->flow activation. link_flow[l] is a flow index, or -1 when link l is idle.
struct Schedule {
  std::vector<int> link_flow;

  explicit Schedule(std::size_t num_links = 0) : link_flow(num_links, -1) {}

  bool empty() const {
    for (int f : link_flow)
      if (f >= 0) return false;
    return true;
  }
  bool operator==(const Schedule& o) const { return link_flow == o.link_flow; }
};

class NetworkTopology {
 public:
  std::vector<NodeId> nodes;                    // ascending
  std::vector<Link> links;                      // lexicographic, index = canonical link id
  std::vector<std::vector<int>> conflict_sets;  // link-index subsets, at most one active each
  std::vector<Flow> flows;                      // declaration order

  // Derived lookups.
  std::vector<std::vector<int>> flow_links;         // [flow] -> link indices along the path, hop order
  std::vector<std::vector<int>> link_flows;         // [link] -> flow indices routed over it, ascending
  std::vector<std::vector<int>> hop_of;             // [flow][link] -> hop position, -1 if off path
  std::vector<uint64_t> conflict_mask;              // [link] -> bitmask of conflicting links
  std::vector<std::vector<int>> maximal_link_sets;  // canonical order, each set ascending

  int link_index(const Link& l) const {
    auto it = std::lower_bound(links.begin(), links.end(), l);
    if (it == links.end() || *it != l) return -1;
    return static_cast<int>(it - links.begin());
  }

  bool links_conflict(int a, int b) const {
    return a != b && (conflict_mask[a] >> b) & 1u;
  }

  bool is_feasible(const Schedule& s) const {
    if (s.link_flow.size() != links.size()) return false;
    std::vector<int> active;
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
      int f = s.link_flow[l];
      if (f < 0) continue;
      if (f >= static_cast<int>(flows.size())) return false;
      if (hop_of[f][l] < 0) return false;  // flow must be routed over the link
      for (int a : active)
        if (links_conflict(a, l)) return false;
      active.push_back(l);
    }
    return true;
  }
};

// Maximal independent link sets in the conflict graph, canonical (lexicographic) order.
inline std::vector<std::vector<int>> enumerate_maximal_link_sets(
    const std::vector<uint64_t>& conflict_mask) {
  const int n = static_cast<int>(conflict_mask.size());
  if (n > 62) throw std::invalid_argument("too many links for schedule enumeration");
  std::vector<std::vector<int>> out;
  // Plain subset DFS with a maximality filter; link counts here are small.
  std::vector<int> cur;
  struct Rec {
    const std::vector<uint64_t>& mask;
    int n;
    std::vector<std::vector<int>>& out;
    void go(int start, std::vector<int>& cur, uint64_t chosen) {
      bool maximal = true;
      for (int l = 0; l < n && maximal; ++l) {
        if ((chosen >> l) & 1u) continue;
        bool compatible = true;
        for (int m : cur)
          if ((mask[m] >> l) & 1u) compatible = false;
        if (compatible) maximal = false;
      }
      if (maximal && !cur.empty()) out.push_back(cur);
      for (int l = start; l < n; ++l) {
        bool compatible = true;
        for (int m : cur)
          if ((mask[m] >> l) & 1u) compatible = false;
        if (!compatible) continue;
        cur.push_back(l);
        go(l + 1, cur, chosen | (1ull << l));
        cur.pop_back();
      }
    }
  } rec{conflict_mask, n, out};
  rec.go(0, cur, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline NetworkTopology validate_and_build(const TopologySpec& spec) {
  NetworkTopology t;

  std::set<std::string> ids;
  std::set<NodeId> node_set(spec.nodes.begin(), spec.nodes.end());
  std::set<std::pair<NodeId, NodeId>> undirected_edges;
  for (const Link& e : spec.declared_edges) {
    if (e.first == e.second) throw std::invalid_argument("self-loop edge " + std::to_string(e.first));
    undirected_edges.insert({std::min(e.first, e.second), std::max(e.first, e.second)});
    node_set.insert(e.first);
    node_set.insert(e.second);
  }

  std::set<Link> link_set;
  for (const Flow& f : spec.flows) {
    if (!ids.insert(f.id).second)
      throw std::invalid_argument("duplicate flow id: " + f.id);
    if (f.arrival_rate < 0.0 || f.arrival_rate > 1.0)
      throw std::invalid_argument("flow " + f.id + ": rate outside [0,1]");
    if (!(f.age_target > 0.0))
      throw std::invalid_argument("flow " + f.id + ": age target must be positive");
    if (f.path.size() < 2)
      throw std::invalid_argument("flow " + f.id + ": path must have length >= 2");
    std::set<NodeId> seen;
    for (NodeId v : f.path) {
      if (!seen.insert(v).second)
        throw std::invalid_argument("flow " + f.id + ": path revisits node " + std::to_string(v));
      node_set.insert(v);
    }
    for (std::size_t i = 0; i + 1 < f.path.size(); ++i) {
      NodeId a = f.path[i], b = f.path[i + 1];
      if (a == b) throw std::invalid_argument("flow " + f.id + ": self-loop hop");
      if (!undirected_edges.empty() &&
          !undirected_edges.count({std::min(a, b), std::max(a, b)}))
        throw std::invalid_argument("flow " + f.id + ": path hop " + std::to_string(a) + "->" +
                                    std::to_string(b) + " not in declared edge list");
      link_set.insert({a, b});
    }
  }

  t.nodes.assign(node_set.begin(), node_set.end());
  t.links.assign(link_set.begin(), link_set.end());
  t.flows = spec.flows;
  for (Flow& f : t.flows) {
    f.src = f.path.front();
    f.des = f.path.back();
  }

  const int E = static_cast<int>(t.links.size());
  const int F = static_cast<int>(t.flows.size());

  if (spec.interference == InterferenceMode::NodeExclusive) {
    // One conflict set per node: all path-derived links touching it (either direction).
    for (NodeId v : t.nodes) {
      std::vector<int> set;
      for (int l = 0; l < E; ++l)
        if (t.links[l].first == v || t.links[l].second == v) set.push_back(l);
      if (set.size() >= 2) t.conflict_sets.push_back(std::move(set));
    }
  } else {
    for (const auto& raw : spec.explicit_conflict_sets) {
      std::vector<int> set;
      for (const Link& e : raw) {
        int l = -1;
        // Accept either direction of a declared conflict edge.
        auto it = link_set.find(e);
        if (it != link_set.end()) {
          l = static_cast<int>(std::distance(link_set.begin(), it));
        } else {
          auto it2 = link_set.find({e.second, e.first});
          if (it2 != link_set.end()) l = static_cast<int>(std::distance(link_set.begin(), it2));
        }
        if (l >= 0) set.push_back(l);
      }
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      if (set.size() >= 2) t.conflict_sets.push_back(std::move(set));
    }
  }

  t.conflict_mask.assign(E, 0);
  for (const auto& set : t.conflict_sets)
    for (int a : set)
      for (int b : set)
        if (a != b) t.conflict_mask[a] |= (1ull << b);

  t.flow_links.resize(F);
  t.link_flows.resize(E);
  t.hop_of.assign(F, std::vector<int>(E, -1));
  for (int f = 0; f < F; ++f) {
    const auto& path = t.flows[f].path;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int l = t.link_index({path[i], path[i + 1]});
      t.flow_links[f].push_back(l);
      t.link_flows[l].push_back(f);
      t.hop_of[f][l] = static_cast<int>(i);
    }
  }
  for (auto& lf : t.link_flows) std::sort(lf.begin(), lf.end());

  t.maximal_link_sets = enumerate_maximal_link_sets(t.conflict_mask);
  return t;
}

// Every feasible activation map, empty schedule first, deterministic order.
inline std::vector<Schedule> enumerate_feasible_schedules(const NetworkTopology& t) {
  const int E = static_cast<int>(t.links.size());
  std::vector<Schedule> out;
  Schedule cur(E);
  std::vector<int> active;
  struct Rec {
    const NetworkTopology& t;
    int E;
    std::vector<Schedule>& out;
    void go(int l, Schedule& cur, std::vector<int>& active) {
      if (l == E) {
        out.push_back(cur);
        return;
      }
      cur.link_flow[l] = -1;
      go(l + 1, cur, active);
      bool compatible = true;
      for (int a : active)
        if (t.links_conflict(a, l)) compatible = false;
      if (compatible) {
        active.push_back(l);
        for (int f : t.link_flows[l]) {
          cur.link_flow[l] = f;
          go(l + 1, cur, active);
        }
        active.pop_back();
        cur.link_flow[l] = -1;
      }
    }
  } rec{t, E, out};
  rec.go(0, cur, active);
  return out;
}

// The two networks used by the bundled experiment tables. Arrival rates default to
// 0.1 and targets to none; callers override both.
inline TopologySpec builtin_network(int which) {
  auto mk = [](std::string id, std::vector<NodeId> path) {
    Flow f;
    f.id = std::move(id);
    f.path = std::move(path);
    f.src = f.path.front();
    f.des = f.path.back();
    f.arrival_rate = 0.1;
    return f;
  };
  TopologySpec s;
  s.nodes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  if (which == 1) {
    s.flows = {mk("1->5", {1, 2, 3, 4, 5}), mk("6->7", {6, 2, 3, 4, 7}),
               mk("8->10", {8, 2, 3, 9, 10}), mk("11->9", {11, 6, 9}),
               mk("11->2", {11, 6, 2})};
  } else if (which == 2) {
    s.flows = {mk("1->9", {1, 2, 4, 5, 7, 9}), mk("3->8", {3, 2, 4, 8}),
               mk("4->10", {4, 5, 3, 6, 10}), mk("4->11", {4, 5, 7, 6, 10, 11})};
  } else {
    throw std::invalid_argument("unknown builtin network " + std::to_string(which));
  }
  return s;
}

}  // namespace aoisim
