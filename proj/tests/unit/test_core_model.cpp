#include "specop/core_model.hpp"
#include "specop/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace specop;

TEST_CASE("center removes a constant level") {
  RealMatrix v = RealMatrix::Constant(6, 3, 5.0);
  const auto s = center(FunctionalSample::on_uniform_grid(v));
  CHECK(s.centered());
  CHECK(s.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("center of a two-point series") {
  // Shorter than any valid FunctionalSample, so exercised on the matrix helper.
  RealMatrix v(2, 1);
  v << 1.0, 3.0;
  const RealMatrix c = center_columns(v);
  CHECK(c(0, 0) == doctest::Approx(-1.0));
  CHECK(c(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("center is idempotent, linear and leaves the input alone") {
  const RealMatrix a = oracle::random_matrix(12, 4, 1);
  const RealMatrix b = oracle::random_matrix(12, 4, 2);
  const auto sa = FunctionalSample::on_uniform_grid(a);
  const auto ca = center(sa);
  CHECK((sa.values() - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(!sa.centered());
  CHECK((center(ca).values() - ca.values()).cwiseAbs().maxCoeff() < 1e-12);

  const double alpha = 2.5, beta = -0.75;
  const RealMatrix lhs =
      center(FunctionalSample::on_uniform_grid(alpha * a + beta * b)).values();
  const RealMatrix rhs =
      alpha * ca.values() +
      beta * center(FunctionalSample::on_uniform_grid(b)).values();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(ca.values().colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("functional sample validation") {
  CHECK_THROWS_AS(FunctionalSample::on_uniform_grid(RealMatrix::Zero(3, 2)),
                  InputError);
  CHECK_THROWS_AS(FunctionalSample::on_uniform_grid(RealMatrix::Zero(4, 1)),
                  InputError);
  CHECK_THROWS_AS(FunctionalSample(RealMatrix::Zero(4, 2), {0.5, 0.5}),
                  InputError);
  CHECK_THROWS_AS(FunctionalSample(RealMatrix::Zero(4, 2), {0.0, 1.5}),
                  InputError);
  RealMatrix nan = RealMatrix::Zero(4, 2);
  nan(1, 1) = std::nan("");
  CHECK_THROWS_AS(FunctionalSample::on_uniform_grid(nan), InputError);
  CHECK_THROWS_AS(
      FunctionalSample::on_uniform_grid(RealMatrix::Ones(4, 2), true),
      InputError);
  const auto ok = FunctionalSample(RealMatrix::Zero(4, 3), {0.0, 0.2, 0.9});
  CHECK(!ok.has_equidistant_grid());
  CHECK(FunctionalSample::on_uniform_grid(RealMatrix::Zero(4, 5))
            .has_equidistant_grid());
}

TEST_CASE("frequency grid") {
  for (Index T : {4, 5, 8, 9, 100, 101}) {
    const FrequencyGrid g(T);
    CHECK(g.half_count() == (T - 1) / 2);
    CHECK(g.count() == 2 * g.half_count() + 1);
    for (Index t = -g.half_count(); t <= g.half_count(); ++t) {
      CHECK(g.lambda(-t) == -g.lambda(t));
      CHECK(g.lambda(t) > -kPi);
      CHECK(g.lambda(t) <= kPi);
      // Antisymmetric except at the antipode, which (-T/2, T/2] sends to +pi.
      if (2 * g.circular_offset(t, -t) != T) {
        CHECK(g.circular_distance(t, -t) == -g.circular_distance(-t, t));
      }
      CHECK(std::abs(g.circular_distance(t, -t)) == std::abs(g.circular_distance(-t, t)));
    }
  }
  const FrequencyGrid g(10);
  // lambda_4 - lambda_{-4} = 16 pi / 10 wraps to -4 pi / 10.
  CHECK(g.circular_offset(4, -4) == -2);
  CHECK(g.circular_distance(4, -4) == doctest::Approx(-0.4 * kPi));
}

TEST_CASE("built-in kernels integrate to 2 pi with closed-form constants") {
  const auto epa = make_weight_kernel("epanechnikov-pi");
  CHECK(std::abs(epa.mass() - kTwoPi) < 1e-8);
  CHECK(epa(0.0) == doctest::Approx(1.5));
  CHECK(epa(kPi) == 0.0);
  CHECK(epa(4.0) == 0.0);
  CHECK(epa.kappa2() == doctest::Approx(12.0 * kPi / 5.0).epsilon(1e-12));
  // 2672 pi^3 / 385 from symbolic integration of the self-convolution.
  CHECK(epa.conv_sq_integral() ==
        doctest::Approx(2672.0 * std::pow(kPi, 3) / 385.0).epsilon(1e-10));

  const auto uni = make_weight_kernel(KernelName::uniform_pi);
  CHECK(std::abs(uni.mass() - kTwoPi) < 1e-8);
  CHECK(uni.kappa2() == doctest::Approx(kTwoPi).epsilon(1e-12));
  // (2 pi - |x|) squared over [-2 pi, 2 pi] = 16 pi^3 / 3.
  CHECK(uni.conv_sq_integral() ==
        doctest::Approx(16.0 * std::pow(kPi, 3) / 3.0).epsilon(1e-10));

  for (double x = -5.0; x <= 5.0; x += 0.137) {
    CHECK(epa(x) == epa(-x));
    CHECK(uni(x) == uni(-x));
    CHECK(epa(x) >= 0.0);
  }
  CHECK_THROWS_AS(make_weight_kernel("gaussian"), InputError);
}

TEST_CASE("spectral field invariants are detected") {
  const Index N = 3, k = 2;
  auto entries = oracle::random_hermitian_field(N, k, 5);
  const SpectralKernelField ok(FrequencyGrid(7), uniform_grid(k), 0.2, entries);
  CHECK(!ok.invariant_violation());

  auto bad = entries;
  bad[static_cast<std::size_t>(N + 1)](0, 1) += 1.0;
  CHECK(SpectralKernelField(FrequencyGrid(7), uniform_grid(k), 0.2, bad)
            .invariant_violation());

  auto unreflected = entries;
  unreflected[0] = entries[static_cast<std::size_t>(2 * N)];
  CHECK(SpectralKernelField(FrequencyGrid(7), uniform_grid(k), 0.2, unreflected)
            .invariant_violation());

  CHECK_THROWS_AS(
      SpectralKernelField(FrequencyGrid(9), uniform_grid(k), 0.2, entries),
      InputError);
  CHECK_THROWS_AS(ok.at(N + 1), InputError);
}
