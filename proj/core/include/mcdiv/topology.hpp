#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace mcdiv {

/// Precondition violation on user-supplied parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometry and medium of a symmetric diffusion link.
///
/// Lengths are in micrometres and the diffusion coefficient in um^2/s.
/// Each transmit antenna is a point emitter at distance `d` from the centre
/// of its aligned receive sphere.  For a 2x2 link the two antennas on each
/// side are separated by `a`, which makes the cross-link centre distance
/// sqrt(d^2 + a^2).  A SISO topology has no separation.
struct SystemTopology {
  double d = 20.0;
  std::optional<double> a;
  double r = 5.0;
  double D = 100.0;

  static SystemTopology siso(double d, double r, double D);
  static SystemTopology mimo(double d, double a, double r, double D);

  [[nodiscard]] bool is_mimo() const noexcept { return a.has_value(); }

  /// Centre distance between Tx1 and Rx2 (and Tx2 and Rx1).
  [[nodiscard]] double cross_distance() const;

  /// Throws InvalidArgument if the invariants do not hold.
  void validate() const;

  [[nodiscard]] std::string describe() const;
};

}  // namespace mcdiv
