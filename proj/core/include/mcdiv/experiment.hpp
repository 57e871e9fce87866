#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcdiv/channel_model.hpp"
#include "mcdiv/curve_fit.hpp"
#include "mcdiv/detectors.hpp"
#include "mcdiv/link_layer.hpp"
#include "mcdiv/particle_sim.hpp"

namespace mcdiv {

/// Scheme, combiner and detector of one BER curve.
struct Configuration {
  Scheme scheme = Scheme::siso;
  Combiner combiner = Combiner::none;
  DetectorKind detector = DetectorKind::mlse;

  /// Rejects combinations without a defined receiver, e.g. Alamouti-type
  /// coding with selection diversity or with a symbol-by-symbol detector.
  void validate() const;
  [[nodiscard]] std::string label() const;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Parses "scheme/combiner/detector", e.g. "repetition/egc/mlse" or "siso/-/ftd".
Configuration parse_configuration(const std::string& text);

/// The nine curves of the number-of-molecules BER figure.
std::vector<Configuration> figure_configurations();

struct BerRecord {
  std::string param;
  double value = 0.0;
  Configuration config;
  std::int64_t errors = 0;  // -1 marks a failed cell
  std::uint64_t bits = 0;
  double ber = 0.0;
  double molecules_per_bit = 0.0;
  double seconds = 0.0;
  double wilson_half_width = 0.0;
  std::string failure;

  [[nodiscard]] bool failed() const noexcept { return errors < 0; }
};

/// 95% Wilson score interval of errors/bits.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval wilson_interval(std::uint64_t errors, std::uint64_t bits, double z = 1.959963984540054);

struct RunSettings {
  Count N = 1000;          // molecules per ON pulse per MIMO antenna
  std::size_t K = 10000;   // bits per replication
  std::size_t R = 20;      // replications
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

/// R independent frames of K bits through encode, arrivals, combine and
/// detect.  SISO frames emit 2N molecules per ON pulse.  FTD thresholds are
/// trained once on a separate frame and then frozen.
BerRecord run_configuration(const Configuration& config, const ChannelTaps& taps,
                            const RunSettings& settings);

enum class SweepParam { N, Ts, d, a, D };
std::string_view to_string(SweepParam param) noexcept;
SweepParam parse_sweep_param(std::string_view text);

/// Operating point of a link; defaults are the standard operating point.
struct LinkParams {
  Count N = 1000;
  double Ts = 0.6;
  double memory_span = 2.4;  // (L+1) Ts
  double d = 20.0;
  double a = 11.0;
  double r = 5.0;
  double D = 100.0;

  [[nodiscard]] SystemTopology mimo_topology() const;
  [[nodiscard]] SystemTopology siso_topology() const;
  [[nodiscard]] int memory() const;
  void set(SweepParam param, double value);
};

/// How 2x2 taps are obtained for an operating point.
struct TapSettings {
  TapSource source = TapSource::walked;
  std::uint64_t molecules = 100000;
  double dt = 0.001;
  AbsorptionCheck absorption = AbsorptionCheck::bridge;
};

struct ChannelPair {
  ChannelTaps siso;
  ChannelTaps mimo;
};

/// SISO taps from the closed form; 2x2 taps from the requested source.  The
/// analytic 2x2 source evaluates the modified responses at b = (1, 0.5, 0.5).
ChannelPair build_channels(const LinkParams& link, const TapSettings& taps,
                           std::uint64_t seed, unsigned workers);

struct SweepSpec {
  SweepParam param = SweepParam::N;
  std::vector<double> values{1000.0};
  LinkParams defaults;
  TapSettings taps;
  std::vector<Configuration> configurations = figure_configurations();
  std::size_t K = 10000;
  std::size_t R = 20;
  std::uint64_t seed = 1;
  unsigned workers = 0;

  void validate() const;
};

using RecordSink = std::function<void(const BerRecord&)>;

/// Every swept value crossed with every configuration.  Records are handed
/// to `sink` as each cell finishes, in deterministic order.  A failing cell
/// yields a record with errors = -1 and the sweep continues.
std::vector<BerRecord> run_sweep(const SweepSpec& spec, const RecordSink& sink = {});

/// The four standard values of a swept parameter.
std::vector<double> table_values(SweepParam param);

/// Sweep mirroring one panel (a..e) of the BER figure.
SweepSpec figure_sweep(char panel, bool full_scale);

}  // namespace mcdiv
