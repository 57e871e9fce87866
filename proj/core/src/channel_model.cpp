#include "mcdiv/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mcdiv {

std::string_view to_string(LinkLayout layout) noexcept {
  return layout == LinkLayout::siso ? "siso" : "mimo2x2";
}

std::string_view to_string(TapSource source) noexcept {
  switch (source) {
    case TapSource::analytic: return "analytic";
    case TapSource::walked: return "walked";
    case TapSource::fitted: return "fitted";
  }
  return "analytic";
}

LinkLayout parse_link_layout(std::string_view text) {
  if (text == "siso") return LinkLayout::siso;
  if (text == "mimo2x2") return LinkLayout::mimo2x2;
  throw InvalidArgument("unknown link layout '" + std::string(text) + "'");
}

TapSource parse_tap_source(std::string_view text) {
  if (text == "analytic") return TapSource::analytic;
  if (text == "walked" || text == "walk") return TapSource::walked;
  if (text == "fitted" || text == "fit") return TapSource::fitted;
  throw InvalidArgument("unknown tap source '" + std::string(text) + "'");
}

std::span<const double> ChannelTaps::link(int rx, int tx) const {
  if (rx < 1 || rx > 2 || tx < 1 || tx > 2) {
    throw InvalidArgument("antenna index out of range");
  }
  if (layout == LinkLayout::siso) {
    if (rx != 1 || tx != 1) throw InvalidArgument("SISO channel has one link");
    return own;
  }
  return rx == tx ? std::span<const double>(own) : std::span<const double>(cross);
}

std::vector<double> ChannelTaps::summed() const {
  if (layout == LinkLayout::siso) return own;
  std::vector<double> h(own.size());
  for (std::size_t l = 0; l < own.size(); ++l) h[l] = own[l] + cross[l];
  return h;
}

void ChannelTaps::validate() const {
  if (!(Ts > 0.0)) throw InvalidArgument("symbol period must be positive");
  if (own.empty()) throw InvalidArgument("channel needs at least one tap");
  if (layout == LinkLayout::mimo2x2 && cross.size() != own.size()) {
    throw InvalidArgument("own and cross tap arrays differ in length");
  }
  if (layout == LinkLayout::siso && !cross.empty()) {
    throw InvalidArgument("SISO channel must not carry cross taps");
  }
  auto check = [](const std::vector<double>& h) {
    double sum = 0.0;
    for (double p : h) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("channel tap outside [0, 1]");
      }
      sum += p;
    }
    if (sum > 1.0 + 1e-12) throw InvalidArgument("channel taps sum above 1");
  };
  check(own);
  check(cross);
}

void HittingCurve::validate() const {
  if (times.empty()) throw InvalidArgument("hitting curve is empty");
  if (own.size() != times.size()) {
    throw InvalidArgument("hitting curve column lengths differ");
  }
  if (!cross.empty() && cross.size() != times.size()) {
    throw InvalidArgument("hitting curve column lengths differ");
  }
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (!(times[n] > (n == 0 ? 0.0 : times[n - 1]))) {
      throw InvalidArgument("hitting curve times must increase strictly");
    }
    const double c = cross.empty() ? 0.0 : cross[n];
    if (own[n] < 0.0 || c < 0.0 || own[n] + c > 1.0 + 1e-12) {
      throw InvalidArgument("hitting curve fractions outside [0, 1]");
    }
    if (n > 0 && (own[n] < own[n - 1] || (!cross.empty() && c < cross[n - 1]))) {
      throw InvalidArgument("hitting curve must be nondecreasing");
    }
  }
}

double hitting_probability(const SystemTopology& topology, double t) {
  topology.validate();
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidArgument("time must be finite and nonnegative");
  }
  if (t == 0.0) return 0.0;
  const double z = (topology.d - topology.r) / std::sqrt(4.0 * topology.D * t);
  return topology.r / topology.d * std::erfc(z);
}

double response_model(const ResponseParams& params, double distance, double r,
                      double D, double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidArgument("time must be finite and nonnegative");
  }
  if (t == 0.0) return 0.0;
  const double spread =
      std::pow(4.0 * D, params.diffusion_exponent) * std::pow(t, params.time_exponent);
  return params.scale * (r / distance) * std::erfc((distance - r) / spread);
}

double own_link_response(const ResponseParams& params,
                         const SystemTopology& topology, double t) {
  topology.validate();
  return response_model(params, topology.d, topology.r, topology.D, t);
}

double cross_link_response(const ResponseParams& params,
                           const SystemTopology& topology, double t) {
  topology.validate();
  return response_model(params, topology.cross_distance(), topology.r,
                        topology.D, t);
}

namespace {

void check_slots(double Ts, int L) {
  if (!(Ts > 0.0) || !std::isfinite(Ts)) {
    throw InvalidArgument("symbol period must be positive");
  }
  if (L < 0) throw InvalidArgument("channel memory must be nonnegative");
}

template <typename Cdf>
std::vector<double> difference(Cdf&& cdf, double Ts, int L) {
  std::vector<double> h(static_cast<std::size_t>(L) + 1);
  double previous = cdf(0.0);
  for (int l = 0; l <= L; ++l) {
    const double next = cdf((l + 1) * Ts);
    h[static_cast<std::size_t>(l)] = std::max(0.0, next - previous);
    previous = next;
  }
  return h;
}

}  // namespace

ChannelTaps siso_taps(const SystemTopology& topology, double Ts, int L) {
  check_slots(Ts, L);
  ChannelTaps taps;
  taps.Ts = Ts;
  taps.layout = LinkLayout::siso;
  taps.source = TapSource::analytic;
  taps.own = difference([&](double t) { return hitting_probability(topology, t); },
                        Ts, L);
  return taps;
}

double interpolate_curve(std::span<const double> times,
                         std::span<const double> values, double t) {
  if (t <= 0.0) return 0.0;
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) {
    throw InvalidArgument("time beyond the last curve sample");
  }
  const auto n = static_cast<std::size_t>(it - times.begin());
  if (*it == t) return values[n];
  const double t0 = n == 0 ? 0.0 : times[n - 1];
  const double v0 = n == 0 ? 0.0 : values[n - 1];
  const double w = (t - t0) / (times[n] - t0);
  return v0 + w * (values[n] - v0);
}

ChannelTaps taps_from_curve(const HittingCurve& curve, double Ts, int L) {
  check_slots(Ts, L);
  curve.validate();
  const double span = (L + 1) * Ts;
  // Slot boundaries computed as (l+1)*Ts may overshoot a sample by an ulp.
  const double last = curve.times.back();
  if (span > last * (1.0 + 1e-9)) {
    throw InvalidArgument("(L+1)*Ts exceeds the simulated horizon");
  }
  auto clamp = [last](double t) { return std::min(t, last); };

  ChannelTaps taps;
  taps.Ts = Ts;
  taps.layout = curve.layout();
  taps.source = TapSource::walked;
  taps.own = difference(
      [&](double t) { return interpolate_curve(curve.times, curve.own, clamp(t)); },
      Ts, L);
  if (!curve.cross.empty()) {
    taps.cross = difference(
        [&](double t) {
          return interpolate_curve(curve.times, curve.cross, clamp(t));
        },
        Ts, L);
  }
  return taps;
}

ChannelTaps taps_from_params(const FitParams& params,
                             const SystemTopology& topology, double Ts, int L) {
  check_slots(Ts, L);
  topology.validate();
  ChannelTaps taps;
  taps.Ts = Ts;
  taps.source = TapSource::fitted;
  taps.own = difference(
      [&](double t) { return own_link_response(params.own, topology, t); }, Ts, L);
  if (params.cross && topology.is_mimo()) {
    taps.layout = LinkLayout::mimo2x2;
    taps.cross = difference(
        [&](double t) { return cross_link_response(*params.cross, topology, t); },
        Ts, L);
  } else {
    taps.layout = LinkLayout::siso;
  }
  return taps;
}

int memory_for_span(double Ts, double span) {
  check_slots(Ts, 0);
  const double slots = std::round(span / Ts);
  if (slots < 1.0) throw InvalidArgument("memory span shorter than one symbol");
  return static_cast<int>(slots) - 1;
}

}  // namespace mcdiv
