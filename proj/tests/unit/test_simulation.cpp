#include "specop/error.hpp"
#include "specop/simulation.hpp"
#include "specop/spectral.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace specop;

TEST_CASE("Brownian bridge draws") {
  const auto grid = uniform_grid(5);  // 0, .25, .5, .75, 1
  const BrownianBridgeSampler sampler(grid);
  Rng rng(42);
  const int n = 10000;
  double var_mid = 0.0, cov = 0.0;
  for (int r = 0; r < n; ++r) {
    const auto v = sampler(rng);
    CHECK(v(0) == 0.0);
    CHECK(v(4) == 0.0);
    var_mid += v(2) * v(2) / n;
    cov += v(1) * v(3) / n;
  }
  CHECK(std::abs(var_mid - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / n));
  // Var of the product of two jointly normal coordinates: s11 s33 + s13^2.
  const double se = std::sqrt((0.1875 * 0.1875 + 0.0625 * 0.0625) / n);
  CHECK(std::abs(cov - 0.0625) < 4.0 * se);

  const RealMatrix C = brownian_bridge_covariance(grid);
  CHECK(C(1, 3) == doctest::Approx(0.0625));
  CHECK(C(2, 2) == doctest::Approx(0.25));
  CHECK(C(0, 0) == 0.0);
}

TEST_CASE("MA generation") {
  MaProcessSpec spec{{0.8}, 50, 21};
  Rng a(7), b(7);
  CHECK((generate_ma(spec, a).values() - generate_ma(spec, b).values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(spec.burn_in() == 1);
  CHECK_THROWS_AS(validate(MaProcessSpec{{0.5, 0.5}, 4, 5}), InputError);

  // q = 0 draws independent bridges row by row.
  Rng w(8), bb(8);
  const auto white = generate_ma({{}, 6, 5}, w);
  const BrownianBridgeSampler sampler(uniform_grid(5));
  for (Index t = 0; t < 6; ++t) {
    CHECK((white.values().row(t).transpose() - sampler(bb)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("MA(1) lag-one autocovariance at the grid midpoint") {
  const Index T = 20000;
  Rng rng(2024);
  const auto s = generate_ma({{0.8}, T, 21}, rng);
  const auto col = s.values().col(10);
  double lag1 = 0.0, lag2 = 0.0, sq = 0.0;
  for (Index t = 0; t + 2 < T; ++t) {
    lag1 += col(t) * col(t + 1);
    lag2 += col(t) * col(t + 2);
    sq += std::pow(col(t) * col(t + 1), 2);
  }
  const double n = static_cast<double>(T - 2);
  lag1 /= n;
  lag2 /= n;
  // Products one step apart are correlated; sqrt(3) allows for that.
  const double se = std::sqrt((sq / n - lag1 * lag1) * 3.0 / n);
  CHECK(std::abs(lag1 - 0.2) < 4.0 * se);
  CHECK(std::abs(lag2) < 4.0 * se);
}

TEST_CASE("closed-form spectral kernel") {
  const MaProcessSpec ma1{{0.8}, 100, 21};
  const ComplexMatrix f0 = true_spectral_kernel(ma1, 0.0);
  CHECK(f0(10, 10).real() == doctest::Approx(0.128915503904).epsilon(1e-11));
  CHECK(f0.imag().cwiseAbs().maxCoeff() == 0.0);

  const MaProcessSpec white{{}, 100, 21};
  const RealMatrix C = brownian_bridge_covariance(uniform_grid(21));
  for (double lam : {-3.0, 0.0, 1.1, oracle::pi}) {
    CHECK((true_spectral_kernel(white, lam).real() - C / (2.0 * oracle::pi)).cwiseAbs().maxCoeff() <
          1e-15);
  }

  // Largest gap between a2 = 1 and a2 = 0 over Fourier frequencies sits at 0.
  const MaProcessSpec ma2{{0.8, 1.0}, 100, 21};
  const FrequencyGrid g(100);
  Index arg = -1;
  double best = -1.0;
  for (Index t = 0; t <= g.half_count(); ++t) {
    const double d =
        (true_spectral_kernel(ma2, g.lambda(t)) - true_spectral_kernel(ma1, g.lambda(t))).norm();
    if (d > best) {
      best = d;
      arg = t;
    }
  }
  CHECK(arg == 0);

  // Inversion back to the autocovariance on a fine frequency grid.
  const MaProcessSpec ma3{{0.8, -0.4, 0.3}, 100, 9};
  const RealMatrix C9 = brownian_bridge_covariance(uniform_grid(9));
  const std::vector<double> a = {1.0, 0.8, -0.4, 0.3};
  const int L = 4096;
  for (int h = 0; h <= 3; ++h) {
    ComplexMatrix r = ComplexMatrix::Zero(9, 9);
    for (int m = 0; m < L; ++m) {
      const double lam = -oracle::pi + 2.0 * oracle::pi * (m + 1) / L;
      r += true_spectral_kernel(ma3, lam) * std::polar(1.0, lam * h);
    }
    r *= 2.0 * oracle::pi / L;
    double coef = 0.0;
    for (int j = 0; j + h < 4; ++j) coef += a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j + h)];
    CHECK((r - (coef * C9).cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("estimation error shrinks from T = 128 to T = 512") {
  const auto W = make_weight_kernel(KernelName::epanechnikov_pi);
  auto error = [&](Index T, std::uint64_t seed) {
    const MaProcessSpec spec{{0.8}, T, 21};
    Rng rng(seed);
    const double b = std::pow(static_cast<double>(T), -1.0 / 3.0);
    const auto F = smooth(dft(center(generate_ma(spec, rng))), W, b);
    const FrequencyGrid g(T);
    double sum = 0.0;
    for (Index l = -g.half_count(); l <= g.half_count(); ++l) {
      sum += (F.at(l) - true_spectral_kernel(spec, g.lambda(l))).norm();
    }
    return sum / static_cast<double>(g.count());
  };
  int better = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    if (error(512, 1000 + s) < error(128, s)) ++better;
  }
  CHECK(better >= 45);
}

TEST_CASE("experiment bookkeeping") {
  ExperimentPlan plan;
  plan.x = {{0.8}, 30, 5};
  plan.y = plan.x;
  plan.analysis.bandwidth = 0.3;
  plan.analysis.bootstrap = BootstrapOptions{};
  plan.analysis.bootstrap->replicates = 99;
  plan.analysis.bootstrap->alphas = {0.05, 0.10};
  plan.repetitions = 1;
  plan.master_seed = 5;
  const auto one = run_experiment(plan);
  CHECK(one.completed == 1);
  CHECK(one.rejection_rate.size() == 2);
  for (double p : one.rejection_rate) CHECK((p == 0.0 || p == 1.0));
  for (const auto& se : one.standard_error) CHECK(!se.has_value());

  plan.repetitions = 6;
  const auto a = run_experiment(plan);
  const auto b = run_experiment(plan);
  CHECK(a.rejection_rate == b.rejection_rate);
  for (std::size_t r = 0; r < a.runs.size(); ++r) {
    CHECK(a.runs[r].t_stat == b.runs[r].t_stat);
    CHECK(a.runs[r].p_value == b.runs[r].p_value);
  }
  for (std::size_t i = 0; i < a.alphas.size(); ++i) {
    const double p = a.rejection_rate[i];
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(*a.standard_error[i] == doctest::Approx(std::sqrt(p * (1.0 - p) / 6.0)));
  }
}
