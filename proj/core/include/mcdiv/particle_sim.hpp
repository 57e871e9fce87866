#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mcdiv/channel_model.hpp"
#include "mcdiv/topology.hpp"

namespace mcdiv {

using WalkRng = std::mt19937_64;

/// How absorption is detected within a time step.
///  - endpoint: only the position at the end of each step is tested.
///  - bridge: additionally, a molecule that ends outside a sphere is
///    absorbed with the Brownian-bridge probability exp(-2 g0 g1 / (2 D dt))
///    of having touched it during the step (g0, g1 = surface gaps).
enum class AbsorptionCheck { endpoint, bridge };

std::string_view to_string(AbsorptionCheck check) noexcept;
AbsorptionCheck parse_absorption_check(std::string_view text);

struct WalkConfig {
  double dt = 0.001;
  double horizon = 2.4;
  std::uint64_t emitted = 100000;
  std::uint64_t seed = 1;
  SystemTopology topology;
  int emitter = 1;
  AbsorptionCheck absorption = AbsorptionCheck::bridge;

  [[nodiscard]] std::size_t steps() const;
  void validate() const;
};

/// Absorption counts per receive sphere and step.
struct WalkCounts {
  std::uint64_t emitted = 0;
  double dt = 0.0;
  // absorbed[j][s]: molecules absorbed by Rx(j+1) during step s+1.
  std::vector<std::vector<std::uint64_t>> absorbed;

  /// Molecules still free after `steps` steps.
  [[nodiscard]] std::uint64_t free_after(std::size_t steps) const;
};

/// Gaussian increment with per-axis variance 2 D dt.
std::array<double, 3> step_displacement(WalkRng& rng, double D, double dt);

/// Seed of the generator that drives molecule `index`.
std::uint64_t molecule_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Random walk of every molecule; identical output for any worker count.
WalkCounts simulate_counts(const WalkConfig& config, unsigned workers = 0);

/// Cumulative absorbed fractions sampled at every step end.
HittingCurve to_hitting_curve(const WalkCounts& counts, int emitter);

HittingCurve simulate_hitting(const WalkConfig& config, unsigned workers = 0);

/// Walked taps for all four links (mirrored by symmetry).
ChannelTaps estimate_mimo_taps(const WalkConfig& config, double Ts, int L,
                               unsigned workers = 0);

}  // namespace mcdiv
