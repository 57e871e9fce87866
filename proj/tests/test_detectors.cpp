#include <doctest.h>

#include <algorithm>
#include <random>

#include "mcdiv/detectors.hpp"
#include "oracles.hpp"

using namespace mcdiv;

namespace {

using Counts = std::vector<Count>;
using Bits = std::vector<Bit>;

std::vector<long long> as_ll(const Counts& y) { return {y.begin(), y.end()}; }

/// Dyadic taps k/1024 keep every product with an integer N exact.
std::vector<double> dyadic_taps(std::mt19937_64& rng, int L) {
  std::uniform_int_distribution<int> pick(0, 200);
  std::vector<double> h(static_cast<std::size_t>(L) + 1);
  for (auto& v : h) v = pick(rng) / 1024.0;
  return h;
}

/// Summed emission level per slot of the Alamouti-type pattern, in units of N.
std::vector<int> alamouti_levels(const Bits& u) {
  std::vector<int> levels;
  for (std::size_t k = 0; k < u.size(); k += 2) {
    levels.push_back(u[k] + u[k + 1]);
    levels.push_back(1 + u[k] - u[k + 1]);
  }
  return levels;
}

/// Brute-force minimum over bits of the squared distance to the convolved
/// Alamouti-type signal, any memory length.
double alamouti_signal_minimum(const Counts& y, const std::vector<double>& h, double N) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << y.size()); ++code) {
    const auto levels = alamouti_levels(oracle::bits_of(code, y.size()));
    double total = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      double mean = 0;
      for (std::size_t l = 0; l < h.size() && l <= k; ++l) mean += N * h[l] * levels[k - l];
      total += (static_cast<double>(y[k]) - mean) * (static_cast<double>(y[k]) - mean);
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace

TEST_SUITE("detectors") {

TEST_CASE("fixed threshold") {
  CHECK(ftd_detect(Counts{5, 4, 0}, 4) == Bits{1, 0, 0});
  CHECK(ftd_detect(Counts{0, 1, 3}, 0) == Bits{0, 1, 1});
  CHECK(ftd_detect(Counts{0, 1, 3}, 3) == Bits{0, 0, 0});
  CHECK_THROWS_AS(ftd_detect(Counts{1}, -1), InvalidArgument);
}

TEST_CASE("raising the threshold only turns ones into zeros") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<Count> draw(0, 30);
  Counts y(50);
  for (auto& v : y) v = draw(rng);
  auto previous = ftd_detect(y, 0);
  for (Count eta = 1; eta <= 31; ++eta) {
    const auto next = ftd_detect(y, eta);
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(next[k] <= previous[k]);
    previous = next;
  }
}

TEST_CASE("threshold optimization") {
  const auto sep = optimize_threshold(Counts{10, 1, 9, 0}, Bits{1, 0, 1, 0});
  CHECK(sep.threshold == 1);
  CHECK(sep.errors == 0);
  CHECK(optimize_threshold(Counts{3, 5, 1}, Bits{1, 1, 1}).threshold == 0);
  CHECK_THROWS_AS(optimize_threshold(Counts{}, Bits{}), InvalidArgument);
  CHECK_THROWS_AS(optimize_threshold(Counts{1}, Bits{1, 0}), InvalidArgument);
}

TEST_CASE("threshold optimization matches brute force") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> length(1, 40);
    std::uniform_int_distribution<Count> draw(0, 25);
    const auto K = static_cast<std::size_t>(length(rng));
    Counts y(K);
    Bits u(K);
    for (std::size_t k = 0; k < K; ++k) {
      u[k] = static_cast<Bit>(rng() & 1u);
      y[k] = draw(rng) + (u[k] ? 5 : 0);
    }
    Count best_eta = 0;
    std::uint64_t best_errors = K + 1;
    const Count top = *std::max_element(y.begin(), y.end());
    for (Count eta = 0; eta <= top; ++eta) {
      std::uint64_t errors = 0;
      for (std::size_t k = 0; k < K; ++k) errors += ((y[k] > eta) ? 1 : 0) != u[k];
      if (errors < best_errors) {
        best_errors = errors;
        best_eta = eta;
      }
    }
    const auto choice = optimize_threshold(y, u);
    CHECK(choice.threshold == best_eta);
    CHECK(choice.errors == best_errors);
  }
}

TEST_CASE("adaptive threshold") {
  CHECK(atd_detect(Counts{3, 3, 5, 2}) == Bits{1, 0, 1, 0});
  CHECK(atd_detect(Counts{4, 4, 4}) == Bits{1, 0, 0});
  CHECK(atd_detect(Counts{0, 0, 0}) == Bits{0, 0, 0});
  std::mt19937_64 rng(2);
  Counts y(30);
  for (auto& v : y) v = static_cast<Count>(rng() % 20);
  Counts shifted{0};
  shifted.insert(shifted.end(), y.begin(), y.end());
  const auto plain = atd_detect(y);
  const auto padded = atd_detect(shifted);
  for (std::size_t k = 1; k < y.size(); ++k) CHECK(padded[k + 1] == plain[k]);
}

TEST_CASE("branch metric") {
  const std::vector<double> h{0.04, 0.02};
  CHECK(mlse_branch_metric(70, Bits{1, 1}, h, 1000) == doctest::Approx(100.0));
  CHECK(mlse_branch_metric(13, Bits{0, 0}, h, 1000) == 169.0);
  CHECK(mlse_branch_metric(40, Bits{1, 0}, h, 1000) == doctest::Approx(0.0));
  CHECK_THROWS_AS(mlse_branch_metric(1, Bits{1}, h, 1000), InvalidArgument);
}

TEST_CASE("memoryless sequence estimate slices against the midpoint") {
  const std::vector<double> h{0.05};
  const Counts y{0, 24, 26, 50, 60, 10};
  const auto est = mlse_detect(y, h, 1000);
  CHECK(est.bits == Bits{0, 0, 1, 1, 1, 0});
  // The exact midpoint ties and keeps 0.
  CHECK(mlse_detect(Counts{25}, h, 1000).bits == Bits{0});
}

TEST_CASE("sequence estimate equals exhaustive minimum") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 300; ++trial) {
    const int L = static_cast<int>(rng() % 4);
    const std::size_t K = 1 + rng() % 12;
    const auto h = dyadic_taps(rng, L);
    const double N = static_cast<double>(100 + rng() % 2000);
    Counts y(K);
    std::uniform_int_distribution<Count> draw(0, 400);
    for (auto& v : y) v = draw(rng);
    const auto est = mlse_detect(y, h, N);
    REQUIRE(est.bits.size() == K);
    const double brute = oracle::exhaustive_sequence_minimum(as_ll(y), h, N);
    CHECK(est.metric == brute);
    CHECK(oracle::sequence_metric(as_ll(y), est.bits, h, N) == est.metric);
  }
}

TEST_CASE("noiseless sequence is recovered") {
  std::mt19937_64 rng(5);
  const std::vector<double> h{0.25, 0.125, 0.0625, 0.03125};
  for (int trial = 0; trial < 50; ++trial) {
    Bits u(40);
    for (auto& b : u) b = static_cast<Bit>(rng() & 1u);
    Counts y(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      double mean = 0;
      for (std::size_t l = 0; l < h.size() && l <= k; ++l) mean += 1024 * h[l] * u[k - l];
      y[k] = static_cast<Count>(mean);
    }
    const auto est = mlse_detect(y, h, 1024);
    CHECK(est.bits == u);
    CHECK(est.metric == 0.0);
  }
}

TEST_CASE("pair metric for silent candidates") {
  const std::vector<double> h{0.04, 0.02};
  const std::vector<int> none;
  // Zero bits still put N molecules in the second slot; with a prior pair of
  // zeros the preceding slot also carried N.
  const std::vector<int> quiet_history{1};
  CHECK(alamouti_pair_metric(0, 0, 0, 0, quiet_history, h, 1000) == doctest::Approx(2000.0));
  CHECK(alamouti_pair_levels(1, 0) == std::array<int, 2>{1, 2});
  CHECK(alamouti_pair_levels(0, 1) == std::array<int, 2>{1, 0});
  // Bits (1, 0) after silence: slot means N h0 and 2 N h0 + N h1.
  CHECK(alamouti_pair_metric(40, 100, 1, 0, none, h, 1000) == doctest::Approx(0.0));
  CHECK(oracle::memory_one_pair_metric(40, 100, 1, 0, 0, 0, 0.04, 0.02, 1000, true) ==
        doctest::Approx(0.0));
}

TEST_CASE("pair metric agrees with the L = 1 expression") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto h = dyadic_taps(rng, 1);
    const double N = static_cast<double>(1 + rng() % 3000);
    const double y0 = static_cast<double>(rng() % 500);
    const double y1 = static_cast<double>(rng() % 500);
    const int u0 = static_cast<int>(rng() & 1u), u1 = static_cast<int>((rng() >> 1) & 1u);
    const int p0 = static_cast<int>((rng() >> 2) & 1u), p1 = static_cast<int>((rng() >> 3) & 1u);
    const std::vector<int> history{1 + p0 - p1};
    CHECK(alamouti_pair_metric(y0, y1, static_cast<Bit>(u0), static_cast<Bit>(u1), history, h,
                               N) == oracle::memory_one_pair_metric(y0, y1, u0, u1, p0, p1, h[0],
                                                              h[1], N));
  }
}

TEST_CASE("alamouti estimate equals exhaustive minimum at L = 1") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t K = 2 * (1 + rng() % 4);
    const auto h = dyadic_taps(rng, 1);
    const double N = static_cast<double>(100 + rng() % 2000);
    Counts y(K);
    std::uniform_int_distribution<Count> draw(0, 300);
    for (auto& v : y) v = draw(rng);
    const auto est = alamouti_mlse_detect(y, h, N);
    CHECK(est.metric == oracle::exhaustive_alamouti_minimum(as_ll(y), h[0], h[1], N));
  }
}

TEST_CASE("alamouti estimate equals brute-force signal model for longer memory") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 150; ++trial) {
    const int L = static_cast<int>(rng() % 5);
    const std::size_t K = 2 * (1 + rng() % 5);
    const auto h = dyadic_taps(rng, L);
    const double N = static_cast<double>(100 + rng() % 2000);
    Counts y(K);
    std::uniform_int_distribution<Count> draw(0, 300);
    for (auto& v : y) v = draw(rng);
    CHECK(alamouti_mlse_detect(y, h, N).metric == alamouti_signal_minimum(y, h, N));
  }
}

TEST_CASE("noiseless alamouti frames are recovered") {
  std::mt19937_64 rng(3);
  const std::vector<double> h{0.25, 0.125, 0.0625, 0.03125};
  for (int trial = 0; trial < 30; ++trial) {
    Bits u(200);
    for (auto& b : u) b = static_cast<Bit>(rng() & 1u);
    const auto levels = alamouti_levels(u);
    Counts y(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      double mean = 0;
      for (std::size_t l = 0; l < h.size() && l <= k; ++l) mean += 1024 * h[l] * levels[k - l];
      y[k] = static_cast<Count>(mean);
    }
    const auto est = alamouti_mlse_detect(y, h, 1024);
    CHECK(est.bits == u);
    CHECK(est.metric == 0.0);
  }
  CHECK_THROWS_AS(alamouti_mlse_detect(Counts{1, 2, 3}, h, 10), InvalidArgument);
  CHECK_THROWS_AS(alamouti_mlse_detect(Counts{}, h, 10), InvalidArgument);
}

TEST_CASE("metrics are nonnegative") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto h = dyadic_taps(rng, 2);
    const Bits c{static_cast<Bit>(rng() & 1u), static_cast<Bit>(rng() & 1u),
                 static_cast<Bit>(rng() & 1u)};
    CHECK(mlse_branch_metric(static_cast<double>(rng() % 100), c, h, 500) >= 0.0);
  }
}

}
