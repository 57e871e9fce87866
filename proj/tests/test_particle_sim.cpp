#include <doctest.h>

#include <cmath>

#include "mcdiv/particle_sim.hpp"

using namespace mcdiv;

namespace {

WalkConfig small_walk(SystemTopology topo, std::uint64_t emitted, double horizon) {
  WalkConfig c;
  c.topology = topo;
  c.emitted = emitted;
  c.horizon = horizon;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_SUITE("particle_sim") {

TEST_CASE("step increments have the diffusion variance") {
  WalkRng rng(2024);
  constexpr int n = 1000000;
  double sum[3] = {0, 0, 0};
  double sq[3] = {0, 0, 0};
  double xy = 0, xz = 0, yz = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = step_displacement(rng, 100.0, 0.001);
    for (int k = 0; k < 3; ++k) {
      sum[k] += s[k];
      sq[k] += s[k] * s[k];
    }
    xy += s[0] * s[1];
    xz += s[0] * s[2];
    yz += s[1] * s[2];
  }
  const double var = 0.2;
  const double se_mean = std::sqrt(var / n);
  const double se_cov = var / std::sqrt(n);
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    CHECK(std::abs(mean) < 3 * se_mean);
    CHECK(std::abs(sq[k] / n - mean * mean - var) < 0.01 * var);
  }
  CHECK(std::abs(xy / n) < 3 * se_cov);
  CHECK(std::abs(xz / n) < 3 * se_cov);
  CHECK(std::abs(yz / n) < 3 * se_cov);
}

TEST_CASE("config validation") {
  WalkConfig c = small_walk(SystemTopology::siso(20, 5, 100), 10, 0.01);
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps() == 10);
  c.horizon = 0.0105;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.horizon = 0.0005;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.horizon = 0.01;
  c.emitted = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.emitted = 10;
  c.emitter = 2;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  // Overlapping receive spheres and emitters inside a sphere never form a valid topology.
  CHECK_THROWS_AS(SystemTopology::mimo(20, 9, 5, 100), InvalidArgument);
  CHECK_THROWS_AS(SystemTopology::siso(4, 5, 100), InvalidArgument);
}

TEST_CASE("identical output for any worker count") {
  const auto c = small_walk(SystemTopology::mimo(10, 11, 5, 200), 3000, 0.3);
  const auto one = simulate_counts(c, 1);
  const auto three = simulate_counts(c, 3);
  const auto eight = simulate_counts(c, 8);
  CHECK(one.absorbed == three.absorbed);
  CHECK(one.absorbed == eight.absorbed);
  auto other = c;
  other.seed = 12;
  CHECK(simulate_counts(other, 1).absorbed != one.absorbed);
}

TEST_CASE("absorbed plus free molecules are conserved") {
  const auto c = small_walk(SystemTopology::mimo(10, 11, 5, 200), 2000, 0.5);
  const auto counts = simulate_counts(c, 2);
  REQUIRE(counts.absorbed.size() == 2);
  std::uint64_t absorbed = 0;
  for (std::size_t s = 0; s < c.steps(); ++s) {
    absorbed += counts.absorbed[0][s] + counts.absorbed[1][s];
    CHECK(absorbed + counts.free_after(s + 1) == c.emitted);
  }
  CHECK(counts.free_after(0) == c.emitted);

  const auto curve = to_hitting_curve(counts, 1);
  CHECK_NOTHROW(curve.validate());
  for (std::size_t s = 0; s < curve.times.size(); ++s) {
    CHECK(curve.own[s] + curve.cross[s] <= 1.0);
  }
  CHECK(curve.times.front() == doctest::Approx(0.001));
  CHECK(curve.times.back() == doctest::Approx(0.5));
}

TEST_CASE("a single molecule yields a Bernoulli curve") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = small_walk(SystemTopology::siso(5.01, 5, 100), 1, 0.001);
    c.seed = seed;
    const auto curve = simulate_hitting(c, 1);
    REQUIRE(curve.own.size() == 1);
    CHECK((curve.own[0] == 0.0 || curve.own[0] == 1.0));
  }
}

TEST_CASE("endpoint check never absorbs more than the bridge check") {
  auto c = small_walk(SystemTopology::siso(20, 5, 100), 4000, 0.6);
  const auto bridge = simulate_hitting(c, 1);
  c.absorption = AbsorptionCheck::endpoint;
  const auto endpoint = simulate_hitting(c, 1);
  CHECK(endpoint.own.back() <= bridge.own.back());
  CHECK(parse_absorption_check("endpoint") == AbsorptionCheck::endpoint);
  CHECK_THROWS_AS(parse_absorption_check("chord"), InvalidArgument);
}

TEST_CASE("second emitter mirrors the first") {
  const auto topo = SystemTopology::mimo(20, 13, 5, 200);
  auto c = small_walk(topo, 20000, 0.6);
  const auto first = simulate_hitting(c, 1);
  c.emitter = 2;
  c.seed = 99;
  const auto second = simulate_hitting(c, 1);
  for (std::size_t s : {199u, 399u, 599u}) {
    for (auto [p, q] : {std::pair{first.own[s], second.own[s]},
                        std::pair{first.cross[s], second.cross[s]}}) {
      const double pooled = (p + q) / 2;
      const double se = std::sqrt(2 * pooled * (1 - pooled) / 20000);
      CHECK(std::abs(p - q) < 3 * se + 1e-12);
    }
  }
}

TEST_CASE("doubling D at half the time leaves the hitting fraction unchanged") {
  auto slow = small_walk(SystemTopology::siso(20, 5, 100), 20000, 0.8);
  auto fast = small_walk(SystemTopology::siso(20, 5, 200), 20000, 0.4);
  fast.seed = 5;
  fast.dt = 0.0005;
  const auto a = simulate_hitting(slow, 1);
  const auto b = simulate_hitting(fast, 1);
  // With dt halved too, step s of both walks sits at the same scaled time.
  REQUIRE(a.own.size() == b.own.size());
  for (std::size_t s : {199u, 399u, 799u}) {
    const double p = a.own[s];
    const double q = b.own[s];
    const double pooled = (p + q) / 2;
    CHECK(std::abs(p - q) < 3 * std::sqrt(2 * pooled * (1 - pooled) / 20000));
  }
}

TEST_CASE("mimo tap estimate is mirrored and bounded") {
  auto c = small_walk(SystemTopology::mimo(20, 13, 5, 200), 20000, 2.4);
  const auto taps = estimate_mimo_taps(c, 0.4, 5, 1);
  CHECK(taps.layout == LinkLayout::mimo2x2);
  CHECK(taps.source == TapSource::walked);
  REQUIRE(taps.own.size() == 6);
  const auto h11 = taps.link(1, 1);
  const auto h22 = taps.link(2, 2);
  CHECK(std::equal(h11.begin(), h11.end(), h22.begin()));
  double own = 0, cross = 0;
  for (std::size_t l = 0; l < 6; ++l) {
    own += taps.own[l];
    cross += taps.cross[l];
  }
  CHECK(own <= 1.0);
  CHECK(cross <= 1.0);
  CHECK(taps.own[0] > taps.cross[0]);
  CHECK_THROWS_AS(estimate_mimo_taps(c, 0.4, 6, 1), InvalidArgument);
}

}
