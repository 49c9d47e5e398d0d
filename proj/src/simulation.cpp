#include "specop/simulation.hpp"

#include "specop/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace specop {

void validate(const MaProcessSpec& spec) {
  if (spec.length < 4 || spec.length <= 2 * spec.order()) {
    throw InputError("MA spec needs T >= 4 and T > 2q");
  }
  if (spec.grid_size < 2) throw InputError("MA spec needs k >= 2");
  for (double a : spec.coefficients) {
    if (!std::isfinite(a)) throw InputError("MA coefficients must be finite");
  }
}

RealMatrix brownian_bridge_covariance(const std::vector<double>& grid) {
  const auto k = static_cast<Index>(grid.size());
  RealMatrix c(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double si = grid[static_cast<std::size_t>(i)];
      const double sj = grid[static_cast<std::size_t>(j)];
      c(i, j) = std::min(si, sj) - si * sj;
    }
  }
  return c;
}

BrownianBridgeSampler::BrownianBridgeSampler(std::vector<double> grid)
    : grid_(std::move(grid)) {
  const RealMatrix cov = brownian_bridge_covariance(grid_);
  for (Index i = 0; i < cov.rows(); ++i) {
    if (cov(i, i) > 0.0) free_.push_back(i);
  }
  const auto m = static_cast<Index>(free_.size());
  RealMatrix sub(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) sub(a, b) = cov(free_[a], free_[b]);
  }
  sub.diagonal().array() += 1e-12;
  const Eigen::LLT<RealMatrix> llt(sub);
  if (llt.info() != Eigen::Success) {
    throw NumericError("Brownian bridge covariance is not positive definite");
  }
  factor_ = llt.matrixL();
}

Eigen::VectorXd BrownianBridgeSampler::operator()(Rng& rng) const {
  std::normal_distribution<double> normal;
  const auto m = static_cast<Index>(free_.size());
  Eigen::VectorXd z(m);
  for (Index i = 0; i < m; ++i) z(i) = normal(rng);
  const Eigen::VectorXd free_values = factor_ * z;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Index>(grid_.size()));
  for (Index i = 0; i < m; ++i) out(free_[i]) = free_values(i);
  return out;
}

Eigen::VectorXd sample_brownian_bridge(const std::vector<double>& grid,
                                       Rng& rng) {
  return BrownianBridgeSampler(grid)(rng);
}

FunctionalSample generate_ma(const MaProcessSpec& spec, Rng& rng) {
  validate(spec);
  const BrownianBridgeSampler bridge(uniform_grid(spec.grid_size));
  const Index q = spec.order();
  const Index T = spec.length;

  RealMatrix innovations(T + q, spec.grid_size);
  for (Index r = 0; r < T + q; ++r) {
    innovations.row(r) = bridge(rng).transpose();
  }
  // Row r of `innovations` is e_{r + 1 - q}.
  RealMatrix values = innovations.bottomRows(T);
  for (Index j = 1; j <= q; ++j) {
    values += spec.coefficients[static_cast<std::size_t>(j - 1)] *
              innovations.middleRows(q - j, T);
  }
  return FunctionalSample(std::move(values), bridge.grid());
}

ComplexMatrix true_spectral_kernel(const MaProcessSpec& spec, double lambda) {
  std::complex<double> transfer = 1.0;
  for (std::size_t j = 0; j < spec.coefficients.size(); ++j) {
    const double phase = -static_cast<double>(j + 1) * lambda;
    transfer += spec.coefficients[j] *
                std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const double gain = std::norm(transfer) / kTwoPi;
  return (gain * brownian_bridge_covariance(uniform_grid(spec.grid_size)))
      .cast<std::complex<double>>();
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  validate(plan.x);
  validate(plan.y);
  if (plan.x.length != plan.y.length || plan.x.grid_size != plan.y.grid_size) {
    throw InputError("experiment needs X and Y of the same shape");
  }
  if (plan.repetitions < 1) throw InputError("experiment needs R >= 1");
  if (!plan.analysis.bootstrap) {
    throw InputError("experiment needs bootstrap options");
  }

  ExperimentResult result;
  result.alphas = plan.analysis.bootstrap->alphas;
  std::sort(result.alphas.begin(), result.alphas.end());
  const auto R = static_cast<std::size_t>(plan.repetitions);
  result.runs.resize(R);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < R; ++r) {
    const std::uint64_t rep_seed = derive_seed(plan.master_seed, "rep", r);
    RepetitionRecord& record = result.runs[r];
    try {
      Rng rng_x = make_rng(rep_seed, "x", 0);
      Rng rng_y = make_rng(rep_seed, "y", 0);
      const FunctionalSample x = generate_ma(plan.x, rng_x);
      const FunctionalSample y = generate_ma(plan.y, rng_y);
      AnalysisOptions options = plan.analysis;
      options.bootstrap->master_seed = derive_seed(rep_seed, "bootstrap", 0);
      const TwoSampleTest test = run_two_sample_test(x, y, options);
      record.t_stat = test.statistic.t_stat;
      record.p_value = test.bootstrap->p_value;
      record.bandwidth = test.bandwidth;
      for (const auto& d : test.decisions) record.rejected.push_back(d.reject);
    } catch (const NumericError&) {
      record = RepetitionRecord{};
      record.failed = true;
    }
  }

  for (const auto& run : result.runs) {
    if (run.failed) {
      ++result.failures;
    } else {
      ++result.completed;
    }
  }
  if (static_cast<double>(result.failures) >
      0.02 * static_cast<double>(plan.repetitions)) {
    throw NumericError("experiment aborted: " +
                       std::to_string(result.failures) + " of " +
                       std::to_string(plan.repetitions) +
                       " repetitions failed");
  }

  for (std::size_t a = 0; a < result.alphas.size(); ++a) {
    Index hits = 0;
    for (const auto& run : result.runs) {
      if (!run.failed && run.rejected[a]) ++hits;
    }
    const double n = static_cast<double>(result.completed);
    const double p = n > 0 ? static_cast<double>(hits) / n : 0.0;
    result.rejection_rate.push_back(p);
    result.standard_error.push_back(
        result.completed >= 2 ? std::optional<double>(std::sqrt(p * (1 - p) / n))
                              : std::nullopt);
  }
  return result;
}

}  // namespace specop
