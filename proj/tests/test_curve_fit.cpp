#include <doctest.h>

#include <cmath>

#include "mcdiv/curve_fit.hpp"

using namespace mcdiv;

namespace {

// Reference model written independently of the library.
double model(double b1, double b2, double b3, double R, double r, double D, double t) {
  return b1 * (r / R) * std::erfc((R - r) / (std::pow(4.0 * D, b2) * std::pow(t, b3)));
}

HittingCurve synthesize(const SystemTopology& topo, ResponseParams own,
                        std::optional<ResponseParams> cross) {
  HittingCurve curve;
  curve.emitted = 1000000;
  curve.dt = 0.001;
  for (int n = 1; n <= 2400; ++n) {
    const double t = 0.001 * n;
    curve.times.push_back(t);
    curve.own.push_back(model(own.scale, own.diffusion_exponent, own.time_exponent, topo.d,
                              topo.r, topo.D, t));
    if (cross) {
      curve.cross.push_back(model(cross->scale, cross->diffusion_exponent,
                                  cross->time_exponent, topo.cross_distance(), topo.r, topo.D,
                                  t));
    }
  }
  return curve;
}

}  // namespace

TEST_SUITE("curve_fit") {

TEST_CASE("round trip recovers known parameters") {
  const auto topo = SystemTopology::mimo(20.0, 13.0, 5.0, 200.0);
  const ResponseParams own{0.9, 0.45, 0.55};
  const ResponseParams cross{0.7, 0.52, 0.48};
  const auto fit = fit_params(synthesize(topo, own, cross), topo);
  CHECK(std::abs(fit.own.scale - 0.9) < 1e-3);
  CHECK(std::abs(fit.own.diffusion_exponent - 0.45) < 1e-3);
  CHECK(std::abs(fit.own.time_exponent - 0.55) < 1e-3);
  REQUIRE(fit.cross.has_value());
  CHECK(std::abs(fit.cross->scale - 0.7) < 1e-3);
  CHECK(std::abs(fit.cross->diffusion_exponent - 0.52) < 1e-3);
  CHECK(std::abs(fit.cross->time_exponent - 0.48) < 1e-3);
  CHECK(fit.residual < 1e-10);
  CHECK(fit.residual == doctest::Approx(fit.own_residual + fit.cross_residual));
  CHECK(fit.window_begin == doctest::Approx(0.001));
  CHECK(fit.window_end == doctest::Approx(2.4));
}

TEST_CASE("closed-form curve fits to the plain diffusion exponents") {
  const auto topo = SystemTopology::siso(20.0, 5.0, 100.0);
  const auto fit = fit_params(synthesize(topo, {1.0, 0.5, 0.5}, std::nullopt), topo);
  CHECK(fit.own.scale == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(fit.own.diffusion_exponent == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(fit.own.time_exponent == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_FALSE(fit.cross.has_value());
}

TEST_CASE("reported residual equals the achieved objective") {
  const auto topo = SystemTopology::siso(20.0, 5.0, 100.0);
  auto curve = synthesize(topo, {1.0, 0.5, 0.5}, std::nullopt);
  // Perturb so the optimum carries a nonzero residual.
  for (std::size_t i = 0; i < curve.own.size(); ++i) curve.own[i] *= 1.0 + 0.01 * std::sin(i * 0.01);
  const auto fit = fit_response(curve.times, curve.own, topo.d, topo.r, topo.D);
  double objective = 0.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double e = curve.own[i] - model(fit.params.scale, fit.params.diffusion_exponent,
                                          fit.params.time_exponent, topo.d, topo.r, topo.D,
                                          curve.times[i]);
    objective += e * e;
  }
  CHECK(fit.residual == doctest::Approx(objective).epsilon(1e-9));
  CHECK(fit.residual > 0.0);
}

TEST_CASE("fitting is deterministic") {
  const auto topo = SystemTopology::mimo(20.0, 13.0, 5.0, 200.0);
  const auto curve = synthesize(topo, {0.95, 0.48, 0.52}, ResponseParams{0.8, 0.5, 0.5});
  const auto a = fit_params(curve, topo);
  const auto b = fit_params(curve, topo);
  CHECK(a.own == b.own);
  CHECK(*a.cross == *b.cross);
  CHECK(a.residual == b.residual);
}

TEST_CASE("degenerate and undersized input") {
  const auto topo = SystemTopology::mimo(20.0, 13.0, 5.0, 200.0);
  auto curve = synthesize(topo, {0.9, 0.45, 0.55}, ResponseParams{0.8, 0.5, 0.5});
  std::fill(curve.cross.begin(), curve.cross.end(), 0.0);
  CHECK_THROWS_AS(fit_params(curve, topo), DegenerateInput);

  auto few = synthesize(topo, {0.9, 0.45, 0.55}, std::nullopt);
  few.times.resize(9);
  few.own.resize(9);
  CHECK_THROWS_AS(fit_params(few, SystemTopology::siso(20, 5, 200)), InvalidArgument);

  auto small = synthesize(topo, {0.9, 0.45, 0.55}, std::nullopt);
  small.emitted = 999;
  CHECK_THROWS_AS(fit_params(small, SystemTopology::siso(20, 5, 200)), InvalidArgument);
}

TEST_CASE("exhausted budget signals non-convergence") {
  const auto topo = SystemTopology::siso(20.0, 5.0, 100.0);
  const auto curve = synthesize(topo, {0.9, 0.45, 0.55}, std::nullopt);
  FitOptions options;
  options.max_iterations = 1;
  CHECK_THROWS_AS(fit_response(curve.times, curve.own, 20, 5, 100, options), ConvergenceError);
}

}
