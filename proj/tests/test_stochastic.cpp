#include <catch_amalgamated.hpp>

#include <cmath>

#include "aoisim/stochastic.hpp"

using namespace aoisim;

TEST_CASE("degenerate channel probabilities") {
  RngStream rng(7, 0, Substream::Channel);
  ChannelModel on{1.0}, off{0.0};
  for (int t = 0; t < 100; ++t) {
    auto h1 = sample_channel_state(on, rng, 3);
    for (auto v : h1) REQUIRE(v == 1);
    auto h0 = sample_channel_state(off, rng, 3);
    for (auto v : h0) REQUIRE(v == 0);
  }
}

TEST_CASE("channel empirical mean within 3 sigma of q") {
  const int n = 100000;
  RngStream rng(42, 0, Substream::Channel);
  ChannelModel cm{0.5};
  long long ones = 0;
  for (int t = 0; t < n; ++t) ones += sample_channel_state(cm, rng, 1)[0];
  double mean = static_cast<double>(ones) / n;
  REQUIRE(std::abs(mean - 0.5) < 0.01);  // 3 binomial sigma ~ 0.0047
}

TEST_CASE("arrival rates: degenerate and empirical") {
  Flow f0, f1;
  f0.id = "z";
  f0.path = {1, 2};
  f0.arrival_rate = 0.0;
  f1 = f0;
  f1.id = "o";
  f1.arrival_rate = 1.0;
  std::vector<Flow> flows{f0, f1};
  RngStream rng(3, 0, Substream::Arrivals);
  for (int t = 0; t < 100; ++t) {
    auto a = sample_arrivals(flows, rng);
    REQUIRE(a[0] == 0);
    REQUIRE(a[1] == 1);
  }

  Flow f;
  f.id = "p";
  f.path = {1, 2};
  f.arrival_rate = 0.1;
  std::vector<Flow> one{f};
  RngStream rng2(42, 1, Substream::Arrivals);
  long long count = 0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) count += sample_arrivals(one, rng2)[0];
  REQUIRE(std::abs(static_cast<double>(count) / n - 0.1) < 0.003);
}

TEST_CASE("identical seed and stream id replay bit-identically") {
  RngStream a(99, 5, Substream::Channel);
  RngStream b(99, 5, Substream::Channel);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct trials and labels give distinct streams") {
  RngStream a(99, 5, Substream::Channel);
  RngStream b(99, 6, Substream::Channel);
  RngStream c(99, 5, Substream::Arrivals);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    uint64_t x = a.next_u64();
    same_ab += (x == b.next_u64());
    same_ac += (x == c.next_u64());
  }
  REQUIRE(same_ab == 0);
  REQUIRE(same_ac == 0);
}

TEST_CASE("cross-link channel samples are uncorrelated") {
  const int n = 100000;
  RngStream rng(2024, 0, Substream::Channel);
  ChannelModel cm{0.5};
  long long sa = 0, sb = 0, sab = 0;
  for (int t = 0; t < n; ++t) {
    auto h = sample_channel_state(cm, rng, 2);
    sa += h[0];
    sb += h[1];
    sab += h[0] & h[1];
  }
  double ma = static_cast<double>(sa) / n, mb = static_cast<double>(sb) / n;
  double cov = static_cast<double>(sab) / n - ma * mb;
  double corr = cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
  REQUIRE(std::abs(corr) < 0.02);
}
