#include "mcdiv/detectors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mcdiv {

std::string_view to_string(DetectorKind kind) noexcept {
  switch (kind) {
    case DetectorKind::ftd: return "ftd";
    case DetectorKind::atd: return "atd";
    case DetectorKind::mlse: return "mlse";
  }
  return "ftd";
}

DetectorKind parse_detector(std::string_view text) {
  if (text == "ftd") return DetectorKind::ftd;
  if (text == "atd") return DetectorKind::atd;
  if (text == "mlse") return DetectorKind::mlse;
  throw InvalidArgument("unknown detector '" + std::string(text) + "'");
}

std::vector<Bit> ftd_detect(std::span<const Count> y, Count threshold) {
  if (threshold < 0) throw InvalidArgument("threshold must be nonnegative");
  std::vector<Bit> bits(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) bits[k] = y[k] > threshold ? 1 : 0;
  return bits;
}

ThresholdChoice optimize_threshold(std::span<const Count> y, std::span<const Bit> bits) {
  if (y.empty()) throw InvalidArgument("threshold training needs data");
  if (y.size() != bits.size()) {
    throw InvalidArgument("training counts and bits differ in length");
  }
  const Count top = *std::max_element(y.begin(), y.end());
  if (top < 0) throw InvalidArgument("counts must be nonnegative");
  const auto levels = static_cast<std::size_t>(top) + 1;
  std::vector<std::uint64_t> ones(levels, 0);
  std::vector<std::uint64_t> zeros(levels, 0);
  std::uint64_t total_zeros = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y[k] < 0) throw InvalidArgument("counts must be nonnegative");
    const auto v = static_cast<std::size_t>(y[k]);
    if (bits[k]) {
      ++ones[v];
    } else {
      ++zeros[v];
      ++total_zeros;
    }
  }
  // At threshold t: ones with y <= t are missed, zeros with y > t are false alarms.
  ThresholdChoice best{0, std::numeric_limits<std::uint64_t>::max()};
  std::uint64_t missed = 0;
  std::uint64_t false_alarms = total_zeros;
  for (std::size_t t = 0; t < levels; ++t) {
    missed += ones[t];
    false_alarms -= zeros[t];
    if (missed + false_alarms < best.errors) {
      best = {static_cast<Count>(t), missed + false_alarms};
    }
  }
  return best;
}

std::vector<Bit> atd_detect(std::span<const Count> y) {
  std::vector<Bit> bits(y.size());
  Count previous = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    bits[k] = y[k] > previous ? 1 : 0;
    previous = y[k];
  }
  return bits;
}

double mlse_branch_metric(double y, std::span<const Bit> candidate,
                          std::span<const double> taps, double N) {
  if (candidate.size() != taps.size()) {
    throw InvalidArgument("branch metric needs L+1 candidate bits");
  }
  double mean = 0.0;
  for (std::size_t l = 0; l < taps.size(); ++l) {
    if (candidate[l]) mean += N * taps[l];
  }
  const double e = y - mean;
  return e * e;
}

namespace {

// Generic trellis search over blocks of `block_bits` bits with a state made of
// the last `history` blocks (most recent block in the low bits).
template <typename Metric>
SequenceEstimate viterbi(std::size_t blocks, unsigned block_bits, unsigned history,
                         Metric&& metric) {
  const std::size_t branches = std::size_t{1} << block_bits;
  const std::size_t states = std::size_t{1} << (block_bits * history);
  const std::size_t mask = states - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();

  struct Survivor {
    std::uint32_t previous;
    std::uint32_t block;
  };
  std::vector<Survivor> trace(blocks * states);
  std::vector<double> cost(states, inf);
  std::vector<double> next_cost(states);
  cost[0] = 0.0;

  for (std::size_t p = 0; p < blocks; ++p) {
    std::fill(next_cost.begin(), next_cost.end(), inf);
    Survivor* row = &trace[p * states];
    // Ascending predecessor order visits the dropped block 0 first; only a
    // strictly better metric replaces it.
    for (std::size_t s = 0; s < states; ++s) {
      if (cost[s] == inf) continue;
      for (std::size_t b = 0; b < branches; ++b) {
        const std::size_t next = ((s << block_bits) | b) & mask;
        const double c = cost[s] + metric(p, s, b);
        if (c < next_cost[next]) {
          next_cost[next] = c;
          row[next] = {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(b)};
        }
      }
    }
    cost.swap(next_cost);
  }

  std::size_t state = 0;
  for (std::size_t s = 1; s < states; ++s) {
    if (cost[s] < cost[state]) state = s;
  }
  SequenceEstimate out;
  out.metric = cost[state];
  out.bits.resize(blocks * block_bits);
  for (std::size_t p = blocks; p-- > 0;) {
    const Survivor sv = trace[p * states + state];
    for (unsigned q = 0; q < block_bits; ++q) {
      out.bits[p * block_bits + q] =
          static_cast<Bit>((sv.block >> (block_bits - 1 - q)) & 1u);
    }
    state = sv.previous;
  }
  return out;
}

void check_taps(std::span<const double> taps, double N) {
  if (taps.empty()) throw InvalidArgument("sequence estimation needs L >= 0 taps");
  if (!(N >= 0.0)) throw InvalidArgument("molecule count must be nonnegative");
}

std::array<double, 2> pair_means(Bit first, Bit second, std::span<const int> history,
                                 std::span<const double> taps, double N) {
  const auto current = alamouti_pair_levels(first, second);
  auto level = [&](std::size_t back) -> double {
    // back = 0 is the slot itself; history[0] is the slot just before the pair.
    return back < history.size() ? history[back] : 0;
  };
  std::array<double, 2> mean{0.0, 0.0};
  for (std::size_t l = 0; l < taps.size(); ++l) {
    const double first_level = l == 0 ? current[0] : level(l - 1);
    const double second_level =
        l == 0 ? current[1] : (l == 1 ? current[0] : level(l - 2));
    mean[0] += N * taps[l] * first_level;
    mean[1] += N * taps[l] * second_level;
  }
  return mean;
}

}  // namespace

SequenceEstimate mlse_detect(std::span<const Count> y, std::span<const double> taps,
                             double N) {
  if (y.empty()) throw InvalidArgument("sequence estimation needs K >= 1");
  check_taps(taps, N);
  const auto L = static_cast<unsigned>(taps.size() - 1);
  if (L > 16) throw InvalidArgument("channel memory too long for the trellis");
  const std::size_t states = std::size_t{1} << L;

  // mean[s][b]: expected count for state s (bit q = u[k-1-q]) and new bit b.
  std::vector<std::array<double, 2>> mean(states);
  std::vector<Bit> candidate(taps.size());
  for (std::size_t s = 0; s < states; ++s) {
    for (Bit b = 0; b < 2; ++b) {
      candidate[0] = b;
      for (unsigned q = 0; q < L; ++q) candidate[q + 1] = (s >> q) & 1u;
      double m = 0.0;
      for (std::size_t l = 0; l < taps.size(); ++l) {
        if (candidate[l]) m += N * taps[l];
      }
      mean[s][b] = m;
    }
  }
  return viterbi(y.size(), 1, L, [&](std::size_t k, std::size_t s, std::size_t b) {
    const double e = static_cast<double>(y[k]) - mean[s][b];
    return e * e;
  });
}

std::array<int, 2> alamouti_pair_levels(Bit first, Bit second) noexcept {
  return {first + second, 1 + first - second};
}

double alamouti_pair_metric(double y_first, double y_second, Bit first, Bit second,
                            std::span<const int> history,
                            std::span<const double> taps, double N) {
  check_taps(taps, N);
  const auto mean = pair_means(first, second, history, taps, N);
  const double e0 = y_first - mean[0];
  const double e1 = y_second - mean[1];
  return e0 * e0 + e1 * e1;
}

SequenceEstimate alamouti_mlse_detect(std::span<const Count> y,
                                      std::span<const double> taps, double N) {
  if (y.empty() || y.size() % 2 != 0) {
    throw InvalidArgument("Alamouti-type detection needs an even, nonzero K");
  }
  check_taps(taps, N);
  const std::size_t L = taps.size() - 1;
  const auto pairs_back = static_cast<unsigned>((L + 1) / 2);
  if (pairs_back > 8) throw InvalidArgument("channel memory too long for the trellis");
  const std::size_t states = std::size_t{1} << (2 * pairs_back);
  const std::size_t blocks = y.size() / 2;

  auto history_of = [&](std::size_t p, std::size_t s) {
    std::vector<int> history;
    history.reserve(2 * pairs_back);
    for (unsigned q = 0; q < pairs_back; ++q) {
      if (p < q + 1) break;  // earlier pairs precede the frame: silent
      const auto block = (s >> (2 * q)) & 3u;
      const auto levels = alamouti_pair_levels(static_cast<Bit>(block >> 1),
                                               static_cast<Bit>(block & 1u));
      history.push_back(levels[1]);
      history.push_back(levels[0]);
    }
    return history;
  };

  // Means for pairs with a complete history do not depend on the pair index.
  std::vector<std::array<std::array<double, 2>, 4>> steady(states);
  for (std::size_t s = 0; s < states; ++s) {
    const auto history = history_of(pairs_back, s);
    for (std::size_t b = 0; b < 4; ++b) {
      steady[s][b] = pair_means(static_cast<Bit>(b >> 1), static_cast<Bit>(b & 1u),
                                history, taps, N);
    }
  }

  return viterbi(blocks, 2, pairs_back, [&](std::size_t p, std::size_t s, std::size_t b) {
    const auto mean =
        p >= pairs_back
            ? steady[s][b]
            : pair_means(static_cast<Bit>(b >> 1), static_cast<Bit>(b & 1u),
                         history_of(p, s), taps, N);
    const double e0 = static_cast<double>(y[2 * p]) - mean[0];
    const double e1 = static_cast<double>(y[2 * p + 1]) - mean[1];
    return e0 * e0 + e1 * e1;
  });
}

}  // namespace mcdiv
