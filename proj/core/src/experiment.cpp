#include "mcdiv/experiment.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

#include "mcdiv/parallel.hpp"

namespace mcdiv {

void Configuration::validate() const {
  if (scheme == Scheme::siso) {
    if (combiner != Combiner::none) {
      throw InvalidArgument("a SISO link has no receive combiner");
    }
    return;
  }
  if (combiner == Combiner::none) {
    throw InvalidArgument("a 2x2 scheme needs a receive combiner (sd or egc)");
  }
  if (scheme == Scheme::alamouti) {
    if (combiner != Combiner::egc) {
      throw InvalidArgument("Alamouti-type coding is defined only with EGC");
    }
    if (detector != DetectorKind::mlse) {
      throw InvalidArgument("Alamouti-type coding needs the joint MLSE detector");
    }
  }
}

std::string Configuration::label() const {
  return std::string(to_string(scheme)) + "/" + std::string(to_string(combiner)) + "/" +
         std::string(to_string(detector));
}

Configuration parse_configuration(const std::string& text) {
  const auto first = text.find('/');
  const auto second = first == std::string::npos ? first : text.find('/', first + 1);
  if (second == std::string::npos) {
    throw InvalidArgument("configuration must look like scheme/combiner/detector: '" +
                          text + "'");
  }
  Configuration c{parse_scheme(text.substr(0, first)),
                  parse_combiner(text.substr(first + 1, second - first - 1)),
                  parse_detector(text.substr(second + 1))};
  if (c.scheme == Scheme::siso && c.combiner != Combiner::none) {
    throw InvalidArgument("a SISO link has no receive combiner");
  }
  c.validate();
  return c;
}

std::vector<Configuration> figure_configurations() {
  using S = Scheme;
  using C = Combiner;
  using Det = DetectorKind;
  return {
      {S::siso, C::none, Det::ftd},        {S::repetition, C::egc, Det::ftd},
      {S::siso, C::none, Det::atd},        {S::repetition, C::sd, Det::atd},
      {S::repetition, C::egc, Det::atd},   {S::siso, C::none, Det::mlse},
      {S::repetition, C::sd, Det::mlse},   {S::repetition, C::egc, Det::mlse},
      {S::alamouti, C::egc, Det::mlse},
  };
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t bits, double z) {
  if (bits == 0) return {0.0, 1.0};
  const double n = static_cast<double>(bits);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // The bounds are exact at the extremes; rounding would otherwise leave 0 < low.
  const double low = errors == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = errors == bits ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

namespace {

struct Frame {
  std::vector<Bit> bits;
  std::vector<Count> y;
  Count emitted = 0;
};

class LinkRunner {
 public:
  LinkRunner(const Configuration& config, const ChannelTaps& taps, Count N)
      : config_(config), taps_(taps), N_(N) {
    config_.validate();
    taps_.validate();
    const bool siso = config_.scheme == Scheme::siso;
    if (siso != (taps_.layout == LinkLayout::siso)) {
      throw InvalidArgument("channel taps do not match scheme " +
                            std::string(to_string(config_.scheme)));
    }
    if (N_ < 1) throw InvalidArgument("N must be at least 1");
    pulse_ = siso ? 2 * N_ : N_;
    const auto summed = taps_.summed();
    switch (config_.scheme) {
      case Scheme::siso: effective_ = taps_.own; break;
      case Scheme::repetition:
        effective_ = summed;
        if (config_.combiner == Combiner::egc) {
          for (double& h : effective_) h *= 2.0;
        }
        break;
      case Scheme::alamouti: effective_ = summed; break;
    }
  }

  Frame frame(std::size_t K, std::uint64_t seed) const {
    LinkRng bit_rng(derive_seed(seed, 0));
    LinkRng noise_rng(derive_seed(seed, 1));
    std::uniform_int_distribution<int> coin(0, 1);
    Frame f;
    f.bits.resize(K);
    for (auto& b : f.bits) b = static_cast<Bit>(coin(bit_rng));
    const auto symbols = map_ook(f.bits, pulse_);
    Emissions x;
    switch (config_.scheme) {
      case Scheme::siso: x = encode_siso(symbols); break;
      case Scheme::repetition: x = encode_repetition(symbols); break;
      case Scheme::alamouti: x = encode_alamouti(symbols, pulse_); break;
    }
    f.emitted = x.total();
    const RxFrame rx = sample_arrivals(x, taps_, noise_rng);
    switch (config_.combiner) {
      case Combiner::none: f.y = rx.antennas[0]; break;
      case Combiner::sd: f.y = combine_sd(rx); break;
      case Combiner::egc: f.y = combine_egc(rx); break;
    }
    return f;
  }

  std::vector<Bit> detect(const std::vector<Count>& y, Count threshold) const {
    switch (config_.detector) {
      case DetectorKind::ftd: return ftd_detect(y, threshold);
      case DetectorKind::atd: return atd_detect(y);
      case DetectorKind::mlse:
        if (config_.scheme == Scheme::alamouti) {
          return alamouti_mlse_detect(y, effective_, static_cast<double>(pulse_)).bits;
        }
        return mlse_detect(y, effective_, static_cast<double>(pulse_)).bits;
    }
    return {};
  }

 private:
  Configuration config_;
  const ChannelTaps& taps_;
  Count N_;
  Count pulse_ = 0;
  std::vector<double> effective_;
};

}  // namespace

BerRecord run_configuration(const Configuration& config, const ChannelTaps& taps,
                            const RunSettings& settings) {
  const auto started = std::chrono::steady_clock::now();
  if (settings.K < 2) throw InvalidArgument("K must be at least 2");
  if (settings.R < 1) throw InvalidArgument("R must be at least 1");
  if (config.scheme == Scheme::alamouti && settings.K % 2 != 0) {
    throw InvalidArgument("Alamouti-type coding needs an even K");
  }
  const LinkRunner runner(config, taps, settings.N);
  const unsigned workers = settings.workers == 0 ? default_workers() : settings.workers;

  Count threshold = 0;
  if (config.detector == DetectorKind::ftd) {
    const Frame training = runner.frame(settings.K, derive_seed(settings.seed, 0x7e41u));
    threshold = optimize_threshold(training.y, training.bits).threshold;
  }

  std::vector<std::uint64_t> errors(settings.R, 0);
  std::vector<Count> emitted(settings.R, 0);
  parallel_chunks(settings.R, settings.R, workers,
                  [&](std::size_t begin, std::size_t end, std::size_t) {
                    for (std::size_t r = begin; r < end; ++r) {
                      const Frame f = runner.frame(settings.K, derive_seed(settings.seed, 1, r));
                      const auto decided = runner.detect(f.y, threshold);
                      std::uint64_t e = 0;
                      for (std::size_t k = 0; k < settings.K; ++k) e += decided[k] != f.bits[k];
                      errors[r] = e;
                      emitted[r] = f.emitted;
                    }
                  });

  BerRecord rec;
  rec.config = config;
  rec.bits = static_cast<std::uint64_t>(settings.K) * settings.R;
  const auto total_errors = std::accumulate(errors.begin(), errors.end(), std::uint64_t{0});
  rec.errors = static_cast<std::int64_t>(total_errors);
  rec.ber = static_cast<double>(total_errors) / static_cast<double>(rec.bits);
  rec.molecules_per_bit =
      static_cast<double>(std::accumulate(emitted.begin(), emitted.end(), Count{0})) /
      static_cast<double>(rec.bits);
  const auto ci = wilson_interval(total_errors, rec.bits);
  rec.wilson_half_width = (ci.high - ci.low) / 2.0;
  rec.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

std::string_view to_string(SweepParam param) noexcept {
  switch (param) {
    case SweepParam::N: return "N";
    case SweepParam::Ts: return "Ts";
    case SweepParam::d: return "d";
    case SweepParam::a: return "a";
    case SweepParam::D: return "D";
  }
  return "N";
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "N") return SweepParam::N;
  if (text == "Ts") return SweepParam::Ts;
  if (text == "d") return SweepParam::d;
  if (text == "a") return SweepParam::a;
  if (text == "D") return SweepParam::D;
  throw InvalidArgument("unknown sweep parameter '" + std::string(text) + "'");
}

SystemTopology LinkParams::mimo_topology() const { return SystemTopology::mimo(d, a, r, D); }

SystemTopology LinkParams::siso_topology() const { return SystemTopology::siso(d, r, D); }

int LinkParams::memory() const { return memory_for_span(Ts, memory_span); }

void LinkParams::set(SweepParam param, double value) {
  switch (param) {
    case SweepParam::N:
      if (value < 1.0 || value != std::round(value)) {
        throw InvalidArgument("N must be a positive integer");
      }
      N = static_cast<Count>(value);
      break;
    case SweepParam::Ts: Ts = value; break;
    case SweepParam::d: d = value; break;
    case SweepParam::a: a = value; break;
    case SweepParam::D: D = value; break;
  }
}

ChannelPair build_channels(const LinkParams& link, const TapSettings& taps,
                           std::uint64_t seed, unsigned workers) {
  const int L = link.memory();
  ChannelPair out;
  out.siso = siso_taps(link.siso_topology(), link.Ts, L);
  const auto topology = link.mimo_topology();
  switch (taps.source) {
    case TapSource::analytic: {
      FitParams plain;
      plain.cross = ResponseParams{};
      out.mimo = taps_from_params(plain, topology, link.Ts, L);
      out.mimo.source = TapSource::analytic;
      break;
    }
    case TapSource::walked:
    case TapSource::fitted: {
      WalkConfig walk;
      walk.dt = taps.dt;
      walk.horizon = (L + 1) * link.Ts;
      walk.emitted = taps.molecules;
      walk.seed = seed;
      walk.topology = topology;
      walk.absorption = taps.absorption;
      const auto curve = simulate_hitting(walk, workers);
      if (taps.source == TapSource::walked) {
        out.mimo = taps_from_curve(curve, link.Ts, L);
      } else {
        out.mimo = taps_from_params(fit_params(curve, topology), topology, link.Ts, L);
      }
      break;
    }
  }
  return out;
}

void SweepSpec::validate() const {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  if (configurations.empty()) throw InvalidArgument("sweep needs a configuration");
  if (K < 100) throw InvalidArgument("K must be at least 100");
  if (R < 1) throw InvalidArgument("R must be at least 1");
  for (const auto& c : configurations) c.validate();
}

std::vector<BerRecord> run_sweep(const SweepSpec& spec, const RecordSink& sink) {
  spec.validate();
  const unsigned workers = spec.workers == 0 ? default_workers() : spec.workers;
  // Common random numbers: every cell sees the same bit and noise streams,
  // and every operating point the same walk seed.
  const std::uint64_t walk_seed = derive_seed(spec.seed, 0x3a1cu);
  const std::uint64_t link_seed = derive_seed(spec.seed, 0xbe5u);

  std::vector<BerRecord> records;
  std::optional<ChannelPair> channels;
  for (double value : spec.values) {
    LinkParams link = spec.defaults;
    std::string channel_error;
    try {
      link.set(spec.param, value);
      if (!channels || spec.param != SweepParam::N) {
        channels = build_channels(link, spec.taps, walk_seed, workers);
      }
    } catch (const std::exception& e) {
      channels.reset();
      channel_error = e.what();
    }
    for (const auto& config : spec.configurations) {
      BerRecord rec;
      try {
        if (!channels) throw std::runtime_error(channel_error);
        const auto& taps =
            config.scheme == Scheme::siso ? channels->siso : channels->mimo;
        rec = run_configuration(config, taps,
                                RunSettings{link.N, spec.K, spec.R, link_seed, workers});
      } catch (const std::exception& e) {
        rec = BerRecord{};
        rec.config = config;
        rec.errors = -1;
        rec.failure = e.what();
      }
      rec.param = std::string(to_string(spec.param));
      rec.value = value;
      if (sink) sink(rec);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<double> table_values(SweepParam param) {
  switch (param) {
    case SweepParam::N: return {500, 1000, 1500, 2000};
    case SweepParam::Ts: return {0.48, 0.6, 0.8, 1.2};
    case SweepParam::d: return {10, 15, 20, 25};
    case SweepParam::a: return {11, 13, 15, 17};
    case SweepParam::D: return {50, 100, 150, 200};
  }
  return {};
}

SweepSpec figure_sweep(char panel, bool full_scale) {
  SweepSpec spec;
  switch (panel) {
    case 'a': spec.param = SweepParam::N; break;
    case 'b': spec.param = SweepParam::Ts; break;
    case 'c': spec.param = SweepParam::d; break;
    case 'd': spec.param = SweepParam::a; break;
    case 'e': spec.param = SweepParam::D; break;
    default: throw InvalidArgument(std::string("unknown figure panel '") + panel + "'");
  }
  spec.values = table_values(spec.param);
  spec.configurations = figure_configurations();
  spec.K = full_scale ? 1000000 : 10000;
  spec.R = full_scale ? 1000 : 20;
  return spec;
}

}  // namespace mcdiv
