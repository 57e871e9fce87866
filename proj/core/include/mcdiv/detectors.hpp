#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mcdiv/link_layer.hpp"

namespace mcdiv {

enum class DetectorKind { ftd, atd, mlse };

std::string_view to_string(DetectorKind kind) noexcept;
DetectorKind parse_detector(std::string_view text);

/// Fixed threshold: 1 iff y[k] > threshold.
std::vector<Bit> ftd_detect(std::span<const Count> y, Count threshold);

struct ThresholdChoice {
  Count threshold = 0;
  std::uint64_t errors = 0;
};

/// Exhaustive search over integer thresholds 0..max(y) for the fewest bit
/// errors on a training frame; ties go to the smallest threshold.
ThresholdChoice optimize_threshold(std::span<const Count> y, std::span<const Bit> bits);

/// Adaptive threshold: 1 iff y[k] > y[k-1], with y[-1] = 0.
std::vector<Bit> atd_detect(std::span<const Count> y);

/// (y - N sum_l h[l] u[k-l])^2 with candidate = (u[k], u[k-1], ..., u[k-L]).
double mlse_branch_metric(double y, std::span<const Bit> candidate,
                          std::span<const double> taps, double N);

struct SequenceEstimate {
  std::vector<Bit> bits;
  double metric = 0.0;
};

/// Viterbi sequence estimation over the last L bits, starting from the
/// all-zero (silent) state without a terminal constraint.  Equal metrics at a
/// merge keep the path whose dropped bit is 0.
SequenceEstimate mlse_detect(std::span<const Count> y, std::span<const double> taps,
                             double N);

/// Summed emission of both antennas, in units of N, for the two slots of an
/// Alamouti-type pair (u_k, u_k+1): {u_k + u_k+1, 1 + u_k - u_k+1}.
std::array<int, 2> alamouti_pair_levels(Bit first, Bit second) noexcept;

/// Joint squared-distance metric of one slot pair under EGC.
///
/// `history` holds the summed emission levels of earlier slots, most recent
/// first (level of slot k-1, k-2, ...); missing entries count as silence.
/// `taps` are the symmetric sums h11 + h12.
double alamouti_pair_metric(double y_first, double y_second, Bit first, Bit second,
                            std::span<const int> history,
                            std::span<const double> taps, double N);

/// Viterbi over slot pairs for the Alamouti-type code with EGC.  The state
/// holds the bits of the last ceil(L/2) pairs; pairs before the frame are
/// silent.
SequenceEstimate alamouti_mlse_detect(std::span<const Count> y,
                                      std::span<const double> taps, double N);

}  // namespace mcdiv
