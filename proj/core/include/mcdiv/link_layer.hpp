#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mcdiv/channel_model.hpp"

namespace mcdiv {

using Count = std::int64_t;
using Bit = std::uint8_t;
using LinkRng = std::mt19937_64;

enum class Scheme { siso, repetition, alamouti };
enum class Combiner { none, sd, egc };

std::string_view to_string(Scheme scheme) noexcept;
std::string_view to_string(Combiner combiner) noexcept;
Scheme parse_scheme(std::string_view text);
Combiner parse_combiner(std::string_view text);

/// Molecules released per antenna and slot: antennas[i][k] = x_{i+1}[k].
struct Emissions {
  std::vector<std::vector<Count>> antennas;

  [[nodiscard]] std::size_t slots() const {
    return antennas.empty() ? 0 : antennas.front().size();
  }
  [[nodiscard]] Count total() const;
};

/// Molecules counted per receive antenna and slot: antennas[j][k] = y_{j+1}[k].
struct RxFrame {
  std::vector<std::vector<Count>> antennas;
};

/// On-off keying: s_k = N u_k.
std::vector<Count> map_ook(std::span<const Bit> bits, Count N);

Emissions encode_siso(std::span<const Count> symbols);

/// Both antennas send the same symbol in every slot.
Emissions encode_repetition(std::span<const Count> symbols);

/// Non-negative Alamouti-type block code over symbol pairs (s_k, s_k+1):
///   slot k:   Tx1 = s_k,         Tx2 = s_k+1
///   slot k+1: Tx1 = N - s_k+1,   Tx2 = s_k
/// Symbols must be in {0, N}; the sequence length must be even.
Emissions encode_alamouti(std::span<const Count> symbols, Count N);

/// y_j[k] = sum_i sum_l Binomial(x_i[k-l], h_ji[l]), one independent draw per
/// (i, l, k).  Slots before the frame are silent.
RxFrame sample_arrivals(const Emissions& emissions, const ChannelTaps& taps,
                        LinkRng& rng);

/// Mean of sample_arrivals: sum_i sum_l h_ji[l] x_i[k-l].
std::vector<std::vector<double>> expected_arrivals(const Emissions& emissions,
                                                   const ChannelTaps& taps);

/// Selection diversity; Rx1 is selected in the symmetric scenario.
std::vector<Count> combine_sd(const RxFrame& rx);

/// Equal-gain combining: y1 + y2.
std::vector<Count> combine_egc(const RxFrame& rx);

}  // namespace mcdiv
