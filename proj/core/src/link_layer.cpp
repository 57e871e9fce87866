#include "mcdiv/link_layer.hpp"

#include <numeric>
#include <string>
#include <utility>

namespace mcdiv {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::siso: return "siso";
    case Scheme::repetition: return "repetition";
    case Scheme::alamouti: return "alamouti";
  }
  return "siso";
}

std::string_view to_string(Combiner combiner) noexcept {
  switch (combiner) {
    case Combiner::none: return "none";
    case Combiner::sd: return "sd";
    case Combiner::egc: return "egc";
  }
  return "none";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "siso") return Scheme::siso;
  if (text == "repetition" || text == "rep") return Scheme::repetition;
  if (text == "alamouti") return Scheme::alamouti;
  throw InvalidArgument("unknown scheme '" + std::string(text) + "'");
}

Combiner parse_combiner(std::string_view text) {
  if (text == "none" || text == "-") return Combiner::none;
  if (text == "sd") return Combiner::sd;
  if (text == "egc") return Combiner::egc;
  throw InvalidArgument("unknown combiner '" + std::string(text) + "'");
}

Count Emissions::total() const {
  Count sum = 0;
  for (const auto& x : antennas) sum = std::accumulate(x.begin(), x.end(), sum);
  return sum;
}

std::vector<Count> map_ook(std::span<const Bit> bits, Count N) {
  if (N < 0) throw InvalidArgument("molecule count must be nonnegative");
  std::vector<Count> symbols(bits.size());
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] > 1) throw InvalidArgument("bits must be 0 or 1");
    symbols[k] = bits[k] ? N : 0;
  }
  return symbols;
}

Emissions encode_siso(std::span<const Count> symbols) {
  return Emissions{{std::vector<Count>(symbols.begin(), symbols.end())}};
}

Emissions encode_repetition(std::span<const Count> symbols) {
  std::vector<Count> x(symbols.begin(), symbols.end());
  return Emissions{{x, x}};
}

Emissions encode_alamouti(std::span<const Count> symbols, Count N) {
  if (symbols.size() % 2 != 0) {
    throw InvalidArgument("Alamouti-type coding needs an even number of symbols");
  }
  Emissions out{{std::vector<Count>(symbols.size()), std::vector<Count>(symbols.size())}};
  auto& tx1 = out.antennas[0];
  auto& tx2 = out.antennas[1];
  for (std::size_t k = 0; k < symbols.size(); k += 2) {
    const Count first = symbols[k];
    const Count second = symbols[k + 1];
    if ((first != 0 && first != N) || (second != 0 && second != N)) {
      throw InvalidArgument("Alamouti-type coding needs OOK symbols in {0, N}");
    }
    tx1[k] = first;
    tx2[k] = second;
    tx1[k + 1] = N - second;
    tx2[k + 1] = first;
  }
  return out;
}

namespace {

void check_shapes(const Emissions& emissions, const ChannelTaps& taps) {
  taps.validate();
  const std::size_t expected = taps.layout == LinkLayout::siso ? 1 : 2;
  if (emissions.antennas.size() != expected) {
    throw InvalidArgument("emission antenna count does not match the channel");
  }
  for (const auto& x : emissions.antennas) {
    if (x.size() != emissions.slots()) {
      throw InvalidArgument("antenna emission sequences differ in length");
    }
    for (Count v : x) {
      if (v < 0) throw InvalidArgument("emissions must be nonnegative");
    }
  }
}

// Binomial samplers are cached per (n, p); OOK emissions take few values.
class BinomialBank {
 public:
  Count draw(Count n, double p, LinkRng& rng) {
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    for (auto& [key, dist] : cache_) {
      if (key.first == n && key.second == p) return dist(rng);
    }
    cache_.emplace_back(std::pair{n, p}, std::binomial_distribution<Count>(n, p));
    return cache_.back().second(rng);
  }

 private:
  std::vector<std::pair<std::pair<Count, double>, std::binomial_distribution<Count>>> cache_;
};

}  // namespace

RxFrame sample_arrivals(const Emissions& emissions, const ChannelTaps& taps,
                        LinkRng& rng) {
  check_shapes(emissions, taps);
  const std::size_t antennas = emissions.antennas.size();
  const std::size_t slots = emissions.slots();
  const std::size_t memory = taps.own.size();

  RxFrame rx;
  rx.antennas.assign(antennas, std::vector<Count>(slots, 0));
  BinomialBank bank;
  for (std::size_t k = 0; k < slots; ++k) {
    for (std::size_t j = 0; j < antennas; ++j) {
      Count y = 0;
      for (std::size_t i = 0; i < antennas; ++i) {
        const auto h = taps.link(static_cast<int>(j) + 1, static_cast<int>(i) + 1);
        const auto& x = emissions.antennas[i];
        for (std::size_t l = 0; l < memory && l <= k; ++l) {
          y += bank.draw(x[k - l], h[l], rng);
        }
      }
      rx.antennas[j][k] = y;
    }
  }
  return rx;
}

std::vector<std::vector<double>> expected_arrivals(const Emissions& emissions,
                                                   const ChannelTaps& taps) {
  check_shapes(emissions, taps);
  const std::size_t antennas = emissions.antennas.size();
  const std::size_t slots = emissions.slots();
  std::vector<std::vector<double>> mean(antennas, std::vector<double>(slots, 0.0));
  for (std::size_t j = 0; j < antennas; ++j) {
    for (std::size_t i = 0; i < antennas; ++i) {
      const auto h = taps.link(static_cast<int>(j) + 1, static_cast<int>(i) + 1);
      for (std::size_t k = 0; k < slots; ++k) {
        for (std::size_t l = 0; l < h.size() && l <= k; ++l) {
          mean[j][k] += h[l] * static_cast<double>(emissions.antennas[i][k - l]);
        }
      }
    }
  }
  return mean;
}

std::vector<Count> combine_sd(const RxFrame& rx) {
  if (rx.antennas.size() != 2) {
    throw InvalidArgument("selection diversity needs two receive antennas");
  }
  return rx.antennas[0];
}

std::vector<Count> combine_egc(const RxFrame& rx) {
  if (rx.antennas.size() != 2) {
    throw InvalidArgument("equal-gain combining needs two receive antennas");
  }
  const auto& y1 = rx.antennas[0];
  const auto& y2 = rx.antennas[1];
  if (y1.size() != y2.size()) throw InvalidArgument("antenna frames differ in length");
  std::vector<Count> y(y1.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = y1[k] + y2[k];
  return y;
}

}  // namespace mcdiv
