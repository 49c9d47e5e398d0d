#pragma once

// Functional MA(q) processes driven by Brownian-bridge innovations, their
// closed-form spectral density kernels, and Monte Carlo size/power runs.

#include "specop/bootstrap.hpp"
#include "specop/core_model.hpp"
#include "specop/pipeline.hpp"
#include "specop/seeding.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace specop {

/// X_t = e_t + sum_{j=1}^{q} a_j e_{t-j}, e_t i.i.d. Brownian bridges
/// observed on `grid_size` equidistant points of [0,1] (endpoints included).
struct MaProcessSpec {
  std::vector<double> coefficients;  // a_1..a_q; a_0 = 1 is implicit
  Index length = 100;
  Index grid_size = 21;

  Index order() const { return static_cast<Index>(coefficients.size()); }
  /// Pre-sample innovations needed: exactly q.
  Index burn_in() const { return order(); }
};

/// Throws InputError unless T > 2q, T >= 4, k >= 2 and coefficients finite.
void validate(const MaProcessSpec& spec);

/// C(i,j) = min(s_i, s_j) - s_i s_j
RealMatrix brownian_bridge_covariance(const std::vector<double>& grid);

/// Draws Brownian-bridge vectors on a fixed grid. Coordinates at s = 0 and
/// s = 1 have zero variance and are returned as exact zeros; the rest use a
/// Cholesky factor of C + 1e-12 I.
class BrownianBridgeSampler {
 public:
  explicit BrownianBridgeSampler(std::vector<double> grid);
  Eigen::VectorXd operator()(Rng& rng) const;
  const std::vector<double>& grid() const { return grid_; }

 private:
  std::vector<double> grid_;
  std::vector<Index> free_;  // grid indices with positive variance
  RealMatrix factor_;        // lower Cholesky factor over free_
};

Eigen::VectorXd sample_brownian_bridge(const std::vector<double>& grid,
                                       Rng& rng);

/// Uncentered sample; innovations e_{1-q}..e_T are drawn in time order.
FunctionalSample generate_ma(const MaProcessSpec& spec, Rng& rng);

/// (2 pi)^{-1} |1 + sum_j a_j e^{-i j lambda}|^2 C_BB on the spec's grid.
ComplexMatrix true_spectral_kernel(const MaProcessSpec& spec, double lambda);

struct ExperimentPlan {
  MaProcessSpec x;
  MaProcessSpec y;
  AnalysisOptions analysis;  // bootstrap must be set
  Index repetitions = 500;
  std::uint64_t master_seed = 0;
};

struct RepetitionRecord {
  bool failed = false;
  double t_stat = 0.0;
  double p_value = 0.0;
  double bandwidth = 0.0;
  std::vector<bool> rejected;  // parallel to ExperimentResult::alphas
};

struct ExperimentResult {
  std::vector<double> alphas;
  std::vector<double> rejection_rate;
  /// sqrt(p(1-p)/R); nullopt when fewer than two repetitions succeeded.
  std::vector<std::optional<double>> standard_error;
  std::vector<RepetitionRecord> runs;
  Index failures = 0;
  Index completed = 0;
};

/// Repetition r draws X and Y from streams derived from
/// derive_seed(master_seed, "rep", r). Repetitions that hit a NumericError
/// are recorded as failures; more than 2% failures throws NumericError.
ExperimentResult run_experiment(const ExperimentPlan& plan);

}  // namespace specop
