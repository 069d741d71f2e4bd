#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aoisim/topology.hpp"

namespace aoisim {

// Substream labels. Environment streams (channel, arrivals) are separate from
// policy streams so that changing the policy never perturbs the realization.
enum class Substream : uint64_t {
  Channel = 1,
  Arrivals = 2,
  TieBreak = 3,
  Stationary = 4,
  Pilot = 5,
};

// Seeded, labeled random stream. Same (seed, trial, label) => same sequence.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t trial, Substream label)
      : engine_(mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) ^ trial) ^
                    static_cast<uint64_t>(label))) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1), 53-bit resolution; avoids implementation-defined
  // distribution adapters so replays are portable.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t u;
    do {
      u = engine_();
    } while (u >= limit);
    return u % n;
  }

 private:
  static uint64_t mix(uint64_t z) {  // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::mt19937_64 engine_;
};

struct ChannelModel {
  double q = 0.5;  // per-link on probability, i.i.d. across links and slots
};

// One gain sample per link, canonical link order.
inline std::vector<uint8_t> sample_channel_state(const ChannelModel& model, RngStream& rng,
                                                 std::size_t num_links) {
  std::vector<uint8_t> h(num_links);
  for (auto& v : h) v = rng.bernoulli(model.q) ? 1 : 0;
  return h;
}

// One Bernoulli arrival indicator per flow, declaration order.
inline std::vector<uint8_t> sample_arrivals(const std::vector<Flow>& flows, RngStream& rng) {
  std::vector<uint8_t> a(flows.size());
  for (std::size_t f = 0; f < flows.size(); ++f)
    a[f] = rng.bernoulli(flows[f].arrival_rate) ? 1 : 0;
  return a;
}

}  // namespace aoisim
