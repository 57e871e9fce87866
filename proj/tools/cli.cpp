#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "mcdiv/channel_model.hpp"
#include "mcdiv/curve_fit.hpp"
#include "mcdiv/experiment.hpp"
#include "mcdiv/parallel.hpp"
#include "mcdiv/particle_sim.hpp"
#include "mcdiv/text_io.hpp"

namespace mcdiv::cli {

namespace {

struct Geometry {
  double d = 20.0;
  double a = 11.0;
  double r = 5.0;
  double D = 100.0;
  std::string mode = "mimo2x2";

  SystemTopology topology() const {
    return parse_link_layout(mode) == LinkLayout::siso ? SystemTopology::siso(d, r, D)
                                                       : SystemTopology::mimo(d, a, r, D);
  }
};

struct WalkFlags {
  double dt = 0.001;
  double horizon = 2.4;
  std::uint64_t molecules = 100000;
  int emitter = 1;
  std::string absorption = "bridge";
};

struct Common {
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string out;
};

void add_geometry(CLI::App* app, Geometry& g, bool with_mode) {
  app->add_option("-d,--distance", g.d, "Tx-to-aligned-Rx centre distance [um]")
      ->capture_default_str();
  app->add_option("-a,--separation", g.a, "antenna separation [um]")->capture_default_str();
  app->add_option("-r,--radius", g.r, "receive sphere radius [um]")->capture_default_str();
  app->add_option("-D,--diffusion", g.D, "diffusion coefficient [um^2/s]")
      ->capture_default_str();
  if (with_mode) {
    app->add_option("--mode,--links", g.mode, "siso or mimo2x2")
        ->check(CLI::IsMember({"siso", "mimo2x2"}))
        ->capture_default_str();
  }
}

void add_walk(CLI::App* app, WalkFlags& w, bool with_horizon) {
  app->add_option("--dt", w.dt, "walk time step [s]")->capture_default_str();
  if (with_horizon) {
    app->add_option("--horizon", w.horizon, "simulated span [s]")->capture_default_str();
    app->add_option("--emitter", w.emitter, "emitting antenna (1 or 2)")
        ->check(CLI::Range(1, 2))
        ->capture_default_str();
  }
  app->add_option("--molecules", w.molecules, "molecules per walk")->capture_default_str();
  app->add_option("--absorption", w.absorption, "bridge or endpoint")
      ->check(CLI::IsMember({"bridge", "endpoint"}))
      ->capture_default_str();
}

void add_common(CLI::App* app, Common& c, const std::string& out_help) {
  app->add_option("--seed", c.seed, "master random seed")->capture_default_str();
  app->add_option("--workers", c.workers, "worker threads (0: MCDIV_WORKERS or all cores)")
      ->capture_default_str();
  app->add_option("-o,--out", c.out, out_help);
}

// Writes through `writer` to the --out file, or to `out` when none is given.
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path.empty()) {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  writer(file);
}

template <typename Reader>
auto load(const std::string& path, Reader&& reader) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return reader(in);
}

WalkConfig walk_config(const Geometry& g, const WalkFlags& w, std::uint64_t seed) {
  WalkConfig c;
  c.dt = w.dt;
  c.horizon = w.horizon;
  c.emitted = w.molecules;
  c.seed = seed;
  c.topology = g.topology();
  c.emitter = w.emitter;
  c.absorption = parse_absorption_check(w.absorption);
  return c;
}

Combiner resolve_combiner(Scheme scheme, const std::string& text) {
  if (text == "auto") return scheme == Scheme::siso ? Combiner::none : Combiner::egc;
  const Combiner c = parse_combiner(text);
  if (scheme == Scheme::siso && c != Combiner::none) {
    throw InvalidArgument("a SISO link has no receive combiner");
  }
  return c;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

std::vector<Configuration> parse_configurations(const std::string& text) {
  if (text == "figure") return figure_configurations();
  std::vector<Configuration> configs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    configs.push_back(parse_configuration(item.substr(begin, end - begin + 1)));
  }
  return configs;
}

SweepSpec sweep_from_file(const std::string& path) {
  const auto kv = load(path, [](std::istream& in) { return read_key_values(in); });
  SweepSpec spec;
  for (const auto& [key, value] : kv) {
    auto number = [&] { return std::stod(value); };
    if (key == "param") spec.param = parse_sweep_param(value);
    else if (key == "values") spec.values = parse_list(value);
    else if (key == "N") spec.defaults.N = static_cast<Count>(number());
    else if (key == "Ts") spec.defaults.Ts = number();
    else if (key == "span") spec.defaults.memory_span = number();
    else if (key == "d") spec.defaults.d = number();
    else if (key == "a") spec.defaults.a = number();
    else if (key == "r") spec.defaults.r = number();
    else if (key == "D") spec.defaults.D = number();
    else if (key == "K") spec.K = static_cast<std::size_t>(number());
    else if (key == "R") spec.R = static_cast<std::size_t>(number());
    else if (key == "taps") spec.taps.source = parse_tap_source(value);
    else if (key == "molecules") spec.taps.molecules = static_cast<std::uint64_t>(number());
    else if (key == "dt") spec.taps.dt = number();
    else if (key == "absorption") spec.taps.absorption = parse_absorption_check(value);
    else if (key == "seed") spec.seed = std::stoull(value);
    else if (key == "workers") spec.workers = static_cast<unsigned>(number());
    else if (key == "configs") spec.configurations = parse_configurations(value);
    else throw InvalidArgument("unknown sweep key '" + key + "'");
  }
  if (!kv.count("values")) spec.values = table_values(spec.param);
  return spec;
}

// Streams rows to `path` as cells finish; the final file equals write_results.
std::vector<BerRecord> run_and_write(const SweepSpec& spec, const std::string& path,
                                     bool timing, std::ostream& out) {
  std::unique_ptr<std::ofstream> file;
  std::ostream* sink = &out;
  if (!path.empty()) {
    file = std::make_unique<std::ofstream>(path, std::ios::trunc);
    if (!*file) throw IoError("cannot open '" + path + "' for writing");
    sink = file.get();
  }
  *sink << kCsvHeader << '\n' << std::flush;
  auto records = run_sweep(spec, [&](const BerRecord& rec) {
    *sink << csv_row(rec, timing) << '\n' << std::flush;
  });
  if (file && !*file) throw IoError("failed writing '" + path + "'");
  return records;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffusion-based molecular communication link simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // walk
  Geometry walk_geo;
  WalkFlags walk_flags;
  Common walk_common;
  auto* walk = app.add_subcommand("walk", "random-walk hitting curves");
  add_geometry(walk, walk_geo, true);
  add_walk(walk, walk_flags, true);
  add_common(walk, walk_common, "hitting-curve output file (default stdout)");

  // fit
  Geometry fit_geo;
  WalkFlags fit_walk;
  Common fit_common;
  std::string fit_curve;
  auto* fit = app.add_subcommand("fit", "fit the modified response model to a curve");
  add_geometry(fit, fit_geo, true);
  add_walk(fit, fit_walk, true);
  add_common(fit, fit_common, "fit parameter output file (default stdout)");
  fit->add_option("--curve", fit_curve, "hitting curve file (default: walk now)");

  // taps
  Geometry taps_geo;
  WalkFlags taps_walk;
  Common taps_common;
  std::string taps_source = "analytic";
  std::string taps_curve;
  std::string taps_fit;
  double taps_Ts = 0.6;
  double taps_span = 2.4;
  std::optional<int> taps_L;
  auto* taps = app.add_subcommand("taps", "compute and export channel taps");
  add_geometry(taps, taps_geo, true);
  add_walk(taps, taps_walk, false);
  add_common(taps, taps_common, "tap table output file (default stdout)");
  taps->add_option("--source", taps_source, "analytic, walked or fitted")
      ->check(CLI::IsMember({"analytic", "walked", "fitted", "walk", "fit"}))
      ->capture_default_str();
  taps->add_option("--Ts", taps_Ts, "symbol period [s]")->capture_default_str();
  taps->add_option("--span", taps_span, "memory span (L+1)Ts [s]")->capture_default_str();
  taps->add_option("-L,--memory", taps_L, "channel memory L (overrides --span)");
  taps->add_option("--curve", taps_curve, "use this hitting curve instead of walking");
  taps->add_option("--params", taps_fit, "use these fit parameters (source fitted)");

  // ber
  Geometry ber_geo;
  WalkFlags ber_walk;
  Common ber_common;
  std::string ber_scheme = "repetition";
  std::string ber_combiner = "auto";
  std::string ber_detector = "mlse";
  std::string ber_source = "walked";
  std::string ber_table;
  Count ber_N = 1000;
  double ber_Ts = 0.6;
  double ber_span = 2.4;
  std::size_t ber_K = 10000;
  std::size_t ber_R = 20;
  bool ber_timing = false;
  auto* ber = app.add_subcommand("ber", "BER of a single configuration");
  add_geometry(ber, ber_geo, false);
  add_walk(ber, ber_walk, false);
  add_common(ber, ber_common, "CSV output file (default stdout)");
  ber->add_option("--scheme", ber_scheme, "siso, repetition or alamouti")
      ->capture_default_str();
  ber->add_option("--combiner", ber_combiner, "auto, none, sd or egc")->capture_default_str();
  ber->add_option("--detector", ber_detector, "ftd, atd or mlse")->capture_default_str();
  ber->add_option("--taps", ber_source, "analytic, walked or fitted 2x2 taps")
      ->capture_default_str();
  ber->add_option("--tap-table", ber_table, "read taps from a tap table file");
  ber->add_option("-N,--molecules-per-pulse", ber_N, "molecules per ON pulse (MIMO)")
      ->capture_default_str();
  ber->add_option("--Ts", ber_Ts, "symbol period [s]")->capture_default_str();
  ber->add_option("--span", ber_span, "memory span (L+1)Ts [s]")->capture_default_str();
  ber->add_option("-K,--bits", ber_K, "bits per replication")->capture_default_str();
  ber->add_option("-R,--replications", ber_R, "replications")->capture_default_str();
  ber->add_flag("--timing", ber_timing, "fill the seconds column with wall time");

  // sweep
  Common sweep_common;
  std::string sweep_config;
  std::optional<std::uint64_t> sweep_seed;
  bool sweep_timing = false;
  auto* sweep = app.add_subcommand("sweep", "BER sweep described by a config file");
  sweep->add_option("-c,--config", sweep_config, "key=value sweep description")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--seed", sweep_seed, "override the config seed");
  sweep->add_option("--workers", sweep_common.workers, "worker threads");
  sweep->add_option("-o,--out", sweep_common.out, "CSV output file (default stdout)");
  sweep->add_flag("--timing", sweep_timing, "fill the seconds column with wall time");

  // repro-fig6
  Common fig_common;
  std::string fig_panel = "a";
  std::string fig_scale = "desk";
  std::string fig_source = "walked";
  std::uint64_t fig_molecules = 100000;
  bool fig_timing = false;
  auto* fig = app.add_subcommand("repro-fig6", "canned reproduction of the BER figure");
  fig->add_option("--panel", fig_panel, "a (N), b (Ts), c (d), d (a), e (D)")
      ->check(CLI::IsMember({"a", "b", "c", "d", "e"}))
      ->capture_default_str();
  fig->add_option("--scale", fig_scale, "desk (K=1e4, R=20) or full (K=1e6, R=1000)")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  fig->add_option("--taps", fig_source, "analytic, walked or fitted 2x2 taps")
      ->check(CLI::IsMember({"analytic", "walked", "fitted"}))
      ->capture_default_str();
  fig->add_option("--molecules", fig_molecules, "molecules per walk")->capture_default_str();
  add_common(fig, fig_common, "CSV output file (default stdout)");
  fig->add_flag("--timing", fig_timing, "fill the seconds column with wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*walk) {
      const auto config = walk_config(walk_geo, walk_flags, walk_common.seed);
      const auto curve = simulate_hitting(config, walk_common.workers);
      emit(walk_common.out, out, [&](std::ostream& os) { write_curve(os, curve); });
    } else if (*fit) {
      const auto topology = fit_geo.topology();
      const auto curve = fit_curve.empty()
                             ? simulate_hitting(walk_config(fit_geo, fit_walk, fit_common.seed),
                                                fit_common.workers)
                             : load(fit_curve, [](std::istream& in) { return read_curve(in); });
      const auto params = fit_params(curve, topology);
      emit(fit_common.out, out, [&](std::ostream& os) { write_fit(os, params); });
    } else if (*taps) {
      const auto topology = taps_geo.topology();
      const int L = taps_L ? *taps_L : memory_for_span(taps_Ts, taps_span);
      const auto source = parse_tap_source(taps_source);
      ChannelTaps result;
      auto curve = [&] {
        if (!taps_curve.empty()) {
          return load(taps_curve, [](std::istream& in) { return read_curve(in); });
        }
        WalkFlags w = taps_walk;
        w.horizon = (L + 1) * taps_Ts;
        return simulate_hitting(walk_config(taps_geo, w, taps_common.seed),
                                taps_common.workers);
      };
      switch (source) {
        case TapSource::analytic:
          if (topology.is_mimo()) {
            FitParams plain;
            plain.cross = ResponseParams{};
            result = taps_from_params(plain, topology, taps_Ts, L);
            result.source = TapSource::analytic;
          } else {
            result = siso_taps(topology, taps_Ts, L);
          }
          break;
        case TapSource::walked: result = taps_from_curve(curve(), taps_Ts, L); break;
        case TapSource::fitted: {
          const auto params =
              taps_fit.empty()
                  ? fit_params(curve(), topology)
                  : load(taps_fit, [](std::istream& in) { return read_fit(in); });
          result = taps_from_params(params, topology, taps_Ts, L);
          break;
        }
      }
      emit(taps_common.out, out, [&](std::ostream& os) { write_taps(os, result); });
    } else if (*ber) {
      Configuration config;
      config.scheme = parse_scheme(ber_scheme);
      config.combiner = resolve_combiner(config.scheme, ber_combiner);
      config.detector = parse_detector(ber_detector);
      config.validate();
      LinkParams link;
      link.N = ber_N;
      link.Ts = ber_Ts;
      link.memory_span = ber_span;
      link.d = ber_geo.d;
      link.a = ber_geo.a;
      link.r = ber_geo.r;
      link.D = ber_geo.D;
      ChannelTaps channel;
      if (!ber_table.empty()) {
        channel = load(ber_table, [](std::istream& in) { return read_taps(in); });
      } else {
        TapSettings tap_settings;
        tap_settings.source = parse_tap_source(ber_source);
        tap_settings.molecules = ber_walk.molecules;
        tap_settings.dt = ber_walk.dt;
        tap_settings.absorption = parse_absorption_check(ber_walk.absorption);
        auto pair = build_channels(link, tap_settings, derive_seed(ber_common.seed, 0x3a1cu),
                                   ber_common.workers);
        channel = config.scheme == Scheme::siso ? pair.siso : pair.mimo;
      }
      auto record = run_configuration(
          config, channel,
          RunSettings{link.N, ber_K, ber_R, derive_seed(ber_common.seed, 0xbe5u),
                      ber_common.workers});
      record.param = "N";
      record.value = static_cast<double>(link.N);
      emit(ber_common.out, out, [&](std::ostream& os) {
        os << kCsvHeader << '\n' << csv_row(record, ber_timing) << '\n';
      });
      err << "wilson95_half_width=" << format_g(record.wilson_half_width) << '\n';
    } else if (*sweep) {
      auto spec = sweep_from_file(sweep_config);
      if (sweep_seed) spec.seed = *sweep_seed;
      if (sweep_common.workers) spec.workers = sweep_common.workers;
      run_and_write(spec, sweep_common.out, sweep_timing, out);
    } else if (*fig) {
      auto spec = figure_sweep(fig_panel[0], fig_scale == "full");
      spec.taps.source = parse_tap_source(fig_source);
      spec.taps.molecules = fig_molecules;
      spec.seed = fig_common.seed;
      spec.workers = fig_common.workers;
      run_and_write(spec, fig_common.out, fig_timing, out);
    }
  } catch (const std::exception& e) {
    err << "mcdiv: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mcdiv::cli
