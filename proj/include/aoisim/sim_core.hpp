#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "aoisim/topology.hpp"

namespace aoisim {

enum class Discipline { DropFreshestOnly, Fcfs, Lcfs };

struct Packet {
  long long gen_time = 0;       // slot in which the packet was generated at the source
  long long eligible_from = 0;  // first slot in which this queue may serve it
};

using Buffer = std::deque<Packet>;  // back = most recent arrival at this queue

// Keep only the freshest packet; returns how many packets were discarded.
// Either the residents (when the newcomer is fresher) or the newcomer itself.
inline int drop_insert(Buffer& buf, const Packet& p) {
  bool fresher = true;
  for (const Packet& r : buf)
    if (r.gen_time >= p.gen_time) fresher = false;
  if (!fresher) return 1;  // stale newcomer discarded
  int dropped = static_cast<int>(buf.size());
  buf.clear();
  buf.push_back(p);
  return dropped;
}

// Destination-side age state for one flow. Age starts at 0 (a generation-0
// packet is taken as delivered at time 0); any constant offset washes out of
// long-run averages.
struct AgeTracker {
  long long latest_delivered_gen = 0;
  long long current_age = 0;
  long long cumulative_age_sum = 0;  // sum of ages at slot boundaries 1..t
};

// Time-average age over boundaries 1..t.
inline double average_age(const AgeTracker& tr, long long t) {
  if (t <= 0) throw std::invalid_argument("average_age: horizon must be >= 1");
  return static_cast<double>(tr.cumulative_age_sum) / static_cast<double>(t);
}

struct StepOutcome {
  std::vector<std::pair<int, int>> served;            // (link, flow) pairs that moved a packet
  std::vector<std::pair<int, long long>> delivered;   // (flow, gen_time)
  long long dropped = 0;
};

class SimState {
 public:
  SimState(const NetworkTopology& topo, Discipline disc)
      : topo_(&topo), disc_(disc), trackers_(topo.flows.size()) {
    buffers_.resize(topo.flows.size());
    for (std::size_t f = 0; f < topo.flows.size(); ++f)
      buffers_[f].resize(topo.flows[f].path.size() - 1);  // one queue per non-destination hop
    delivered_count_.assign(topo.flows.size(), 0);
    created_count_.assign(topo.flows.size(), 0);
    dropped_count_.assign(topo.flows.size(), 0);
  }

  const NetworkTopology& topology() const { return *topo_; }
  Discipline discipline() const { return disc_; }
  const AgeTracker& tracker(int flow) const { return trackers_[flow]; }
  const Buffer& buffer(int flow, int hop) const { return buffers_[flow][hop]; }
  Buffer& buffer(int flow, int hop) { return buffers_[flow][hop]; }

  long long delivered_count(int flow) const { return delivered_count_[flow]; }
  long long created_count(int flow) const { return created_count_[flow]; }
  long long dropped_count(int flow) const { return dropped_count_[flow]; }

  // Q_i^f(t): packets at hop position `hop` servable in slot t. Packets relayed
  // in during slot t carry eligible_from = t+1 and are excluded.
  int eligible_count(int flow, int hop, long long t) const {
    int n = 0;
    for (const Packet& p : buffers_[flow][hop])
      if (p.eligible_from <= t) ++n;
    return n;
  }

  // Age of flow f at decision time in slot t.
  long long age(int flow, long long t) const {
    return t - trackers_[flow].latest_delivered_gen;
  }

  // Exogenous arrivals at the start of slot t; packets are eligible in slot t.
  void apply_arrivals(const std::vector<uint8_t>& arrivals, long long t) {
    for (std::size_t f = 0; f < arrivals.size(); ++f) {
      if (!arrivals[f]) continue;
      Packet p{t, t};
      ++created_count_[f];
      insert(static_cast<int>(f), 0, p);
    }
  }

  // Apply one slot of service. The caller provides a feasible schedule and the
  // channel realization; gain-0 or empty-buffer activations move nothing.
  void serve(const Schedule& schedule, const std::vector<uint8_t>& channel, long long t,
             StepOutcome& out) {
    const NetworkTopology& topo = *topo_;
    for (int l = 0; l < static_cast<int>(topo.links.size()); ++l) {
      int f = schedule.link_flow[l];
      if (f < 0 || !channel[l]) continue;
      int hop = topo.hop_of[f][l];
      Buffer& buf = buffers_[f][hop];
      int idx = pick_index(buf, t, hop);
      if (idx < 0) continue;
      Packet p = buf[idx];
      buf.erase(buf.begin() + idx);
      out.served.push_back({l, f});
      if (hop + 1 == static_cast<int>(topo.flows[f].path.size()) - 1) {
        out.delivered.push_back({f, p.gen_time});
        ++delivered_count_[f];
      } else {
        p.eligible_from = t + 1;  // relayed packets join the next queue at t+1
        insert(f, hop + 1, p);
      }
    }
  }

  // Slot boundary t+1: fold deliveries into the age trackers and accumulate.
  void finish_slot(const StepOutcome& out, long long t) {
    for (auto [f, gen] : out.delivered)
      if (gen > trackers_[f].latest_delivered_gen) trackers_[f].latest_delivered_gen = gen;
    for (auto& tr : trackers_) {
      tr.current_age = (t + 1) - tr.latest_delivered_gen;
      tr.cumulative_age_sum += tr.current_age;
    }
  }

  long long total_dropped() const {
    long long n = 0;
    for (auto d : dropped_count_) n += d;
    return n;
  }

  long long in_transit(int flow) const {
    long long n = 0;
    for (const Buffer& b : buffers_[flow]) n += static_cast<long long>(b.size());
    return n;
  }

 private:
  void insert(int flow, int hop, const Packet& p) {
    Buffer& buf = buffers_[flow][hop];
    if (disc_ == Discipline::DropFreshestOnly)
      dropped_count_[flow] += drop_insert(buf, p);
    else
      buf.push_back(p);  // arrival order; FCFS/LCFS pick ends at service time
  }

  // Which packet the discipline serves in slot t, or -1. LCFS applies at the
  // source queue (inject freshest first); relays forward in arrival order, so
  // backlogged relay queues still delay even the freshest injections.
  int pick_index(const Buffer& buf, long long t, int hop) const {
    if (buf.empty()) return -1;
    if (disc_ == Discipline::Lcfs && hop == 0) {
      for (int i = static_cast<int>(buf.size()) - 1; i >= 0; --i)
        if (buf[i].eligible_from <= t) return i;
      return -1;
    }
    // DropFreshestOnly holds at most one packet; FCFS serves the head.
    return buf.front().eligible_from <= t ? 0 : -1;
  }

  const NetworkTopology* topo_;
  Discipline disc_;
  std::vector<std::vector<Buffer>> buffers_;  // [flow][hop]
  std::vector<AgeTracker> trackers_;
  std::vector<long long> delivered_count_, created_count_, dropped_count_;
};

// One full slot: arrivals, service under the given schedule, boundary update.
inline StepOutcome step(SimState& state, const Schedule& schedule,
                        const std::vector<uint8_t>& channel,
                        const std::vector<uint8_t>& arrivals, long long t) {
  if (!state.topology().is_feasible(schedule))
    throw std::invalid_argument("step: infeasible schedule");
  StepOutcome out;
  long long dropped_before = state.total_dropped();
  state.apply_arrivals(arrivals, t);
  state.serve(schedule, channel, t, out);
  state.finish_slot(out, t);
  out.dropped = state.total_dropped() - dropped_before;
  return out;
}

}  // namespace aoisim
