#include "mcdiv/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "mcdiv/parallel.hpp"

namespace mcdiv {

std::string_view to_string(AbsorptionCheck check) noexcept {
  return check == AbsorptionCheck::endpoint ? "endpoint" : "bridge";
}

AbsorptionCheck parse_absorption_check(std::string_view text) {
  if (text == "endpoint") return AbsorptionCheck::endpoint;
  if (text == "bridge") return AbsorptionCheck::bridge;
  throw InvalidArgument("unknown absorption check '" + std::string(text) + "'");
}

std::size_t WalkConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void WalkConfig::validate() const {
  topology.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) {
    throw InvalidArgument("horizon must be at least one step");
  }
  const double n = horizon / dt;
  if (std::abs(n - std::round(n)) > 1e-6 * n) {
    throw InvalidArgument("horizon must be an integer number of steps");
  }
  if (emitted < 1) throw InvalidArgument("at least one molecule must be emitted");
  if (emitter != 1 && !(emitter == 2 && topology.is_mimo())) {
    throw InvalidArgument("emitter index must be 1, or 2 for a 2x2 topology");
  }
}

std::uint64_t WalkCounts::free_after(std::size_t steps) const {
  std::uint64_t gone = 0;
  for (const auto& rx : absorbed) {
    gone += std::accumulate(rx.begin(), rx.begin() + static_cast<std::ptrdiff_t>(
                                                         std::min(steps, rx.size())),
                            std::uint64_t{0});
  }
  return emitted - gone;
}

std::array<double, 3> step_displacement(WalkRng& rng, double D, double dt) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(2.0 * D * dt));
  return {gauss(rng), gauss(rng), gauss(rng)};
}

std::uint64_t molecule_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return derive_seed(seed, index);
}

namespace {

struct Sphere {
  std::array<double, 3> centre;
};

constexpr std::size_t kNotAbsorbed = static_cast<std::size_t>(-1);

struct Walker {
  const WalkConfig& config;
  std::vector<Sphere> spheres;
  std::array<double, 3> start;
  double radius;
  double variance;   // per axis, 2 D dt
  double near_gap;   // beyond this gap the bridge probability is < 1e-12
  std::size_t steps;

  explicit Walker(const WalkConfig& c)
      : config(c),
        radius(c.topology.r),
        variance(2.0 * c.topology.D * c.dt),
        steps(c.steps()) {
    const double d = c.topology.d;
    spheres.push_back({{d, 0.0, 0.0}});
    double emitter_y = 0.0;
    if (c.topology.is_mimo()) {
      spheres.push_back({{d, *c.topology.a, 0.0}});
      if (c.emitter == 2) emitter_y = *c.topology.a;
    }
    start = {0.0, emitter_y, 0.0};
    near_gap = std::sqrt(-std::log(1e-12) * variance / 2.0);
    for (const auto& s : spheres) {
      if (distance(start, s) <= radius) {
        throw InvalidArgument("emitter lies inside a receive sphere");
      }
    }
  }

  static double distance(const std::array<double, 3>& p, const Sphere& s) {
    return std::hypot(p[0] - s.centre[0], p[1] - s.centre[1], p[2] - s.centre[2]);
  }

  static double distance2(const std::array<double, 3>& p, const Sphere& s) {
    const double x = p[0] - s.centre[0];
    const double y = p[1] - s.centre[1];
    const double z = p[2] - s.centre[2];
    return x * x + y * y + z * z;
  }

  // Returns the receiver index and the 0-based step of absorption.
  std::pair<std::size_t, std::size_t> walk(std::uint64_t index) const {
    WalkRng rng(molecule_seed(config.seed, index));
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(variance));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const bool bridge = config.absorption == AbsorptionCheck::bridge;
    const double r2 = radius * radius;
    const double near2 = (radius + near_gap) * (radius + near_gap);

    std::array<double, 3> pos = start;
    std::array<double, 2> prev_d2{};
    for (std::size_t j = 0; j < spheres.size(); ++j) prev_d2[j] = distance2(pos, spheres[j]);

    for (std::size_t s = 0; s < steps; ++s) {
      pos[0] += gauss(rng);
      pos[1] += gauss(rng);
      pos[2] += gauss(rng);
      for (std::size_t j = 0; j < spheres.size(); ++j) {
        const double d2 = distance2(pos, spheres[j]);
        if (d2 <= r2) return {j, s};
        if (bridge && (d2 < near2 || prev_d2[j] < near2)) {
          const double g0 = std::sqrt(prev_d2[j]) - radius;
          const double g1 = std::sqrt(d2) - radius;
          const double p = std::exp(-2.0 * g0 * g1 / variance);
          if (uniform(rng) < p) return {j, s};
        }
        prev_d2[j] = d2;
      }
    }
    return {kNotAbsorbed, kNotAbsorbed};
  }
};

}  // namespace

WalkCounts simulate_counts(const WalkConfig& config, unsigned workers) {
  config.validate();
  if (workers == 0) workers = default_workers();
  const Walker walker(config);
  const std::size_t receivers = walker.spheres.size();
  const std::size_t steps = walker.steps;

  // Fixed chunking keeps the reduction independent of the worker count.
  const std::size_t chunks = std::min<std::uint64_t>(config.emitted, 256);
  std::vector<std::vector<std::vector<std::uint64_t>>> partial(
      chunks, std::vector<std::vector<std::uint64_t>>(
                  receivers, std::vector<std::uint64_t>(steps, 0)));
  parallel_chunks(config.emitted, chunks, workers,
                  [&](std::size_t begin, std::size_t end, std::size_t chunk) {
                    auto& counts = partial[chunk];
                    for (std::size_t m = begin; m < end; ++m) {
                      const auto [rx, step] = walker.walk(m);
                      if (rx != kNotAbsorbed) ++counts[rx][step];
                    }
                  });

  WalkCounts out;
  out.emitted = config.emitted;
  out.dt = config.dt;
  out.absorbed.assign(receivers, std::vector<std::uint64_t>(steps, 0));
  for (const auto& counts : partial) {
    for (std::size_t j = 0; j < receivers; ++j) {
      for (std::size_t s = 0; s < steps; ++s) out.absorbed[j][s] += counts[j][s];
    }
  }
  return out;
}

HittingCurve to_hitting_curve(const WalkCounts& counts, int emitter) {
  if (counts.absorbed.empty() || counts.emitted == 0) {
    throw InvalidArgument("walk produced no counts");
  }
  const std::size_t steps = counts.absorbed.front().size();
  const bool mimo = counts.absorbed.size() == 2;
  const std::size_t own_rx = (mimo && emitter == 2) ? 1 : 0;

  HittingCurve curve;
  curve.emitted = counts.emitted;
  curve.dt = counts.dt;
  curve.times.resize(steps);
  curve.own.resize(steps);
  if (mimo) curve.cross.resize(steps);
  const double total = static_cast<double>(counts.emitted);
  std::uint64_t own = 0;
  std::uint64_t cross = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    curve.times[s] = static_cast<double>(s + 1) * counts.dt;
    own += counts.absorbed[own_rx][s];
    curve.own[s] = static_cast<double>(own) / total;
    if (mimo) {
      cross += counts.absorbed[1 - own_rx][s];
      curve.cross[s] = static_cast<double>(cross) / total;
    }
  }
  return curve;
}

HittingCurve simulate_hitting(const WalkConfig& config, unsigned workers) {
  return to_hitting_curve(simulate_counts(config, workers), config.emitter);
}

ChannelTaps estimate_mimo_taps(const WalkConfig& config, double Ts, int L,
                               unsigned workers) {
  if (!((L + 1) * Ts <= config.horizon * (1.0 + 1e-9))) {
    throw InvalidArgument("(L+1)*Ts exceeds the walk horizon");
  }
  return taps_from_curve(simulate_hitting(config, workers), Ts, L);
}

}  // namespace mcdiv
