#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcdiv/topology.hpp"

namespace mcdiv {

enum class LinkLayout { siso, mimo2x2 };
enum class TapSource { analytic, walked, fitted };

std::string_view to_string(LinkLayout layout) noexcept;
std::string_view to_string(TapSource source) noexcept;
LinkLayout parse_link_layout(std::string_view text);
TapSource parse_tap_source(std::string_view text);

/// Per-slot absorption probabilities of the equivalent discrete-time channel.
///
/// The 2x2 link is symmetric, so only the own-link taps h11 (= h22) and the
/// cross-link taps h21 (= h12) are stored; the other two links are mirrors.
/// A SISO channel carries only `own`.
struct ChannelTaps {
  double Ts = 0.0;
  LinkLayout layout = LinkLayout::siso;
  TapSource source = TapSource::analytic;
  std::vector<double> own;
  std::vector<double> cross;

  /// Effective memory L; the tap arrays hold L + 1 entries.
  [[nodiscard]] int memory() const noexcept {
    return static_cast<int>(own.size()) - 1;
  }

  /// Taps of the link from Tx`tx` to Rx`rx` (1-based antenna indices).
  [[nodiscard]] std::span<const double> link(int rx, int tx) const;

  /// h11[l] + h12[l]: the single-antenna view of a symmetric 2x2 channel.
  [[nodiscard]] std::vector<double> summed() const;

  void validate() const;
};

/// Empirical cumulative hit fractions after one antenna emits.
///
/// `own` is the fraction absorbed by the aligned receiver, `cross` the
/// fraction absorbed by the other receiver (empty for SISO).
struct HittingCurve {
  std::vector<double> times;
  std::vector<double> own;
  std::vector<double> cross;
  std::uint64_t emitted = 0;
  double dt = 0.0;

  [[nodiscard]] LinkLayout layout() const noexcept {
    return cross.empty() ? LinkLayout::siso : LinkLayout::mimo2x2;
  }
  void validate() const;
};

/// Scale, diffusion exponent and time exponent of the modified response
/// b * (r/R) * erfc((R - r) / ((4D)^p * t^q)) with R the centre distance.
struct ResponseParams {
  double scale = 1.0;
  double diffusion_exponent = 0.5;
  double time_exponent = 0.5;

  friend bool operator==(const ResponseParams&, const ResponseParams&) = default;
};

/// b1..b3 (own link) and b4..b6 (cross link) with fit diagnostics.
struct FitParams {
  ResponseParams own;
  std::optional<ResponseParams> cross;
  double own_residual = 0.0;
  double cross_residual = 0.0;
  double residual = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
};

/// Probability that a molecule released at distance d from a single
/// absorbing sphere has been absorbed by time t.
double hitting_probability(const SystemTopology& topology, double t);

/// h[l] = F((l+1)Ts) - F(l Ts) for l = 0..L from the closed-form SISO curve.
ChannelTaps siso_taps(const SystemTopology& topology, double Ts, int L);

/// Response model at an arbitrary centre distance; 0 at t = 0.
double response_model(const ResponseParams& params, double distance,
                      double r, double D, double t);

/// Own-link modified response F11(t).
double own_link_response(const ResponseParams& params,
                         const SystemTopology& topology, double t);

/// Cross-link modified response F21(t); requires a 2x2 topology.
double cross_link_response(const ResponseParams& params,
                           const SystemTopology& topology, double t);

/// Cumulative curve value at `t`, interpolating linearly between samples and
/// anchored at (0, 0).
double interpolate_curve(std::span<const double> times,
                         std::span<const double> values, double t);

/// Differencing an empirical curve at slot boundaries.  Rejects
/// (L+1)Ts beyond the last sample.
ChannelTaps taps_from_curve(const HittingCurve& curve, double Ts, int L);

/// Differencing the fitted model functions at slot boundaries.
ChannelTaps taps_from_params(const FitParams& params,
                             const SystemTopology& topology, double Ts, int L);

/// L such that (L+1)Ts covers `span` seconds, e.g. 2.4 s at Ts = 0.6 s -> 3.
int memory_for_span(double Ts, double span);

}  // namespace mcdiv
