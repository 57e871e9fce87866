#include "mcdiv/curve_fit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>

namespace mcdiv {

namespace {

class ResponseProblem {
 public:
  ResponseProblem(const std::vector<double>& times,
                  const std::vector<double>& values, double distance, double r,
                  double D)
      : values_(values.data(), static_cast<Eigen::Index>(values.size())),
        log_t_(static_cast<Eigen::Index>(times.size())),
        gap_(distance - r),
        ratio_(r / distance),
        log_4d_(std::log(4.0 * D)) {
    for (std::size_t n = 0; n < times.size(); ++n) {
      log_t_[static_cast<Eigen::Index>(n)] = std::log(times[n]);
    }
  }

  [[nodiscard]] Eigen::Index size() const { return values_.size(); }

  // values - model
  Eigen::VectorXd residual(const Eigen::Vector3d& b) const {
    Eigen::VectorXd res(size());
    for (Eigen::Index n = 0; n < size(); ++n) {
      res[n] = values_[n] - b[0] * ratio_ * std::erfc(argument(b, n));
    }
    return res;
  }

  // Jacobian of the residual (negated model derivative).
  Eigen::MatrixXd jacobian(const Eigen::Vector3d& b) const {
    Eigen::MatrixXd jac(size(), 3);
    const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
    for (Eigen::Index n = 0; n < size(); ++n) {
      const double z = argument(b, n);
      const double slope = b[0] * ratio_ * two_over_sqrt_pi * std::exp(-z * z) * z;
      jac(n, 0) = -ratio_ * std::erfc(z);
      jac(n, 1) = -slope * log_4d_;
      jac(n, 2) = -slope * log_t_[n];
    }
    return jac;
  }

 private:
  double argument(const Eigen::Vector3d& b, Eigen::Index n) const {
    return gap_ * std::exp(-b[1] * log_4d_ - b[2] * log_t_[n]);
  }

  Eigen::Map<const Eigen::VectorXd> values_;
  Eigen::VectorXd log_t_;
  double gap_;
  double ratio_;
  double log_4d_;
};

struct LocalResult {
  Eigen::Vector3d b;
  double cost;
  int iterations;
};

std::optional<LocalResult> levenberg_marquardt(const ResponseProblem& problem,
                                               Eigen::Vector3d b, int max_iterations) {
  Eigen::VectorXd res = problem.residual(b);
  double cost = res.squaredNorm();
  if (!std::isfinite(cost)) return std::nullopt;
  double lambda = 1e-3;

  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::MatrixXd jac = problem.jacobian(b);
    const Eigen::Matrix3d normal = jac.transpose() * jac;
    const Eigen::Vector3d gradient = jac.transpose() * res;
    if (gradient.lpNorm<Eigen::Infinity>() <= 1e-300) {
      return LocalResult{b, cost, it};
    }

    bool improved = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d damped = normal;
      for (int k = 0; k < 3; ++k) {
        damped(k, k) += lambda * std::max(normal(k, k), 1e-12);
      }
      const Eigen::Vector3d step = damped.ldlt().solve(-gradient);
      const Eigen::Vector3d trial = b + step;
      const Eigen::VectorXd trial_res = problem.residual(trial);
      const double trial_cost = trial_res.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double drop = cost - trial_cost;
        const double step_size = step.norm();
        b = trial;
        res = trial_res;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-15);
        improved = true;
        if (drop <= 1e-15 * cost || step_size <= 1e-13 * (1.0 + b.norm())) {
          return LocalResult{b, cost, it};
        }
        break;
      }
      lambda *= 10.0;
    }
    // No descent direction at any damping: a stationary point.
    if (!improved) return LocalResult{b, cost, it};
  }
  return std::nullopt;
}

bool admissible(const Eigen::Vector3d& b) {
  return b.allFinite() && b[0] > 0.0 && b[2] > 0.0;
}

bool better(const LocalResult& lhs, const LocalResult& rhs) {
  if (lhs.cost != rhs.cost) return lhs.cost < rhs.cost;
  return std::tie(lhs.b[0], lhs.b[1], lhs.b[2]) < std::tie(rhs.b[0], rhs.b[1], rhs.b[2]);
}

}  // namespace

ResponseFit fit_response(const std::vector<double>& times,
                         const std::vector<double>& values, double distance,
                         double r, double D, const FitOptions& options) {
  if (times.size() != values.size()) {
    throw InvalidArgument("fit data columns differ in length");
  }
  if (times.size() < options.min_points) {
    throw InvalidArgument("fit needs at least " + std::to_string(options.min_points) +
                          " points");
  }
  bool any_signal = false;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (!(times[n] > 0.0)) throw InvalidArgument("fit times must be positive");
    any_signal = any_signal || values[n] > 0.0;
  }
  if (!any_signal) throw DegenerateInput("curve has no hits to fit");

  const ResponseProblem problem(times, values, distance, r, D);
  std::optional<LocalResult> best;
  for (double b1 : options.scale_starts) {
    for (double b2 : options.diffusion_exponent_starts) {
      for (double b3 : options.time_exponent_starts) {
        auto local = levenberg_marquardt(problem, Eigen::Vector3d(b1, b2, b3),
                                         options.max_iterations);
        if (!local || !admissible(local->b)) continue;
        if (!best || better(*local, *best)) best = local;
      }
    }
  }
  if (!best) {
    throw ConvergenceError("curve fit did not converge from any start point");
  }
  return ResponseFit{{best->b[0], best->b[1], best->b[2]}, best->cost,
                     best->iterations};
}

FitParams fit_params(const HittingCurve& curve, const SystemTopology& topology,
                     const FitOptions& options) {
  curve.validate();
  topology.validate();
  if (curve.emitted < options.min_emitted) {
    throw InvalidArgument("fit needs a curve estimated from at least " +
                          std::to_string(options.min_emitted) + " molecules");
  }
  FitParams out;
  const auto own = fit_response(curve.times, curve.own, topology.d, topology.r,
                                topology.D, options);
  out.own = own.params;
  out.own_residual = own.residual;
  if (!curve.cross.empty()) {
    const auto cross = fit_response(curve.times, curve.cross,
                                    topology.cross_distance(), topology.r,
                                    topology.D, options);
    out.cross = cross.params;
    out.cross_residual = cross.residual;
  }
  out.residual = out.own_residual + out.cross_residual;
  out.window_begin = curve.times.front();
  out.window_end = curve.times.back();
  return out;
}

}  // namespace mcdiv
