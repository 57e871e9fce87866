#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "mcdiv/channel_model.hpp"

namespace mcdiv {

/// The optimizer exhausted its budget on every start point.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input curve carries no signal to fit (e.g. all-zero hit counts).
class DegenerateInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct FitOptions {
  int max_iterations = 300;
  // Multistart grid, visited in lexicographic order.
  std::vector<double> scale_starts{0.5, 1.0, 1.5};
  std::vector<double> diffusion_exponent_starts{0.3, 0.5, 0.7};
  std::vector<double> time_exponent_starts{0.3, 0.5, 0.7};
  std::size_t min_points = 10;
  std::uint64_t min_emitted = 1000;
};

/// Result of fitting one response curve.
struct ResponseFit {
  ResponseParams params;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Gauss-Newton fit of the modified response at a fixed centre
/// distance, restarted from every grid point.  The lowest residual wins; ties
/// go to the lexicographically smallest parameter triple.
ResponseFit fit_response(const std::vector<double>& times,
                         const std::vector<double>& values, double distance,
                         double r, double D, const FitOptions& options = {});

/// Fits b1..b3 to the own-link curve and, for 2x2 curves, b4..b6 to the
/// cross-link curve over the whole sampled window.
FitParams fit_params(const HittingCurve& curve, const SystemTopology& topology,
                     const FitOptions& options = {});

}  // namespace mcdiv
