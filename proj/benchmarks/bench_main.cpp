#include <benchmark/benchmark.h>

#include <random>

#include "mcdiv/curve_fit.hpp"
#include "mcdiv/detectors.hpp"
#include "mcdiv/link_layer.hpp"
#include "mcdiv/particle_sim.hpp"

using namespace mcdiv;

namespace {

ChannelTaps default_mimo_taps() {
  ChannelTaps t;
  t.Ts = 0.6;
  t.layout = LinkLayout::mimo2x2;
  t.own = {0.0286, 0.0331, 0.0213, 0.0148};
  t.cross = {0.0093, 0.0185, 0.0159, 0.0122};
  return t;
}

std::vector<Bit> random_bits(std::size_t K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Bit> bits(K);
  for (auto& b : bits) b = static_cast<Bit>(rng() & 1u);
  return bits;
}

void BM_RandomWalk(benchmark::State& state) {
  WalkConfig c;
  c.topology = SystemTopology::mimo(20, 11, 5, 100);
  c.emitted = static_cast<std::uint64_t>(state.range(0));
  c.horizon = 2.4;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_counts(c, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2400);
}
BENCHMARK(BM_RandomWalk)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SampleArrivals(benchmark::State& state) {
  const auto taps = default_mimo_taps();
  const auto e = encode_repetition(map_ook(random_bits(10000, 1), 1000));
  LinkRng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(sample_arrivals(e, taps, rng));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleArrivals)->Unit(benchmark::kMillisecond);

void BM_SequenceEstimate(benchmark::State& state) {
  const auto taps = default_mimo_taps();
  const auto h = taps.summed();
  const auto e = encode_repetition(map_ook(random_bits(10000, 3), 1000));
  LinkRng rng(4);
  const auto y = combine_egc(sample_arrivals(e, taps, rng));
  std::vector<double> doubled(h.size());
  for (std::size_t l = 0; l < h.size(); ++l) doubled[l] = 2 * h[l];
  for (auto _ : state) benchmark::DoNotOptimize(mlse_detect(y, doubled, 1000));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SequenceEstimate)->Unit(benchmark::kMillisecond);

void BM_PairSequenceEstimate(benchmark::State& state) {
  const auto taps = default_mimo_taps();
  const auto bits = random_bits(10000, 5);
  const auto e = encode_alamouti(map_ook(bits, 1000), 1000);
  LinkRng rng(6);
  const auto y = combine_egc(sample_arrivals(e, taps, rng));
  for (auto _ : state) benchmark::DoNotOptimize(alamouti_mlse_detect(y, taps.summed(), 1000));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_PairSequenceEstimate)->Unit(benchmark::kMillisecond);

void BM_CurveFit(benchmark::State& state) {
  const auto topo = SystemTopology::siso(20, 5, 100);
  std::vector<double> times, values;
  for (int n = 1; n <= 2400; ++n) {
    times.push_back(0.001 * n);
    values.push_back(own_link_response({0.9, 0.45, 0.55}, topo, 0.001 * n));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_response(times, values, 20, 5, 100));
}
BENCHMARK(BM_CurveFit)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
