#include "specop/bootstrap.hpp"

#include "specop/error.hpp"
#include "specop/statistic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace specop {

MatrixFactor psd_factor(const ComplexMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) {
    throw InputError("psd factorization needs a square matrix");
  }
  const double scale =
      hermitian.size() == 0 ? 0.0 : hermitian.cwiseAbs().maxCoeff();
  const ComplexMatrix adjoint = hermitian.adjoint();
  if ((hermitian - adjoint).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale)) {
    throw InputError("psd factorization needs a Hermitian matrix");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(
      0.5 * (hermitian + adjoint));
  if (eig.info() != Eigen::Success) {
    throw NumericError("Hermitian eigendecomposition failed");
  }
  Eigen::VectorXd roots = eig.eigenvalues();
  double clipped = 0.0;
  for (Index i = 0; i < roots.size(); ++i) {
    if (roots(i) < 0.0) {
      clipped += -roots(i);
      roots(i) = 0.0;
    } else {
      roots(i) = std::sqrt(roots(i));
    }
  }
  const ComplexMatrix& U = eig.eigenvectors();
  MatrixFactor out;
  out.root = U * roots.asDiagonal() * U.adjoint();
  out.clipped_mass = clipped;
  return out;
}

PsdFactor::PsdFactor(FrequencyGrid frequencies, std::vector<double> grid,
                     std::vector<ComplexMatrix> factors, double clipped_mass)
    : frequencies_(frequencies),
      grid_(std::move(grid)),
      factors_(std::move(factors)),
      clipped_mass_(clipped_mass) {
  if (static_cast<Index>(factors_.size()) != frequencies_.half_count()) {
    throw InputError("psd factor needs one matrix per positive frequency");
  }
}

const ComplexMatrix& PsdFactor::at(Index t) const {
  if (t < 1 || t > frequencies_.half_count()) {
    throw InputError("psd factor index must lie in 1..N");
  }
  return factors_[static_cast<std::size_t>(t - 1)];
}

PsdFactor psd_factorize(const SpectralKernelField& pooled_field) {
  const Index N = pooled_field.half_count();
  std::vector<ComplexMatrix> factors(static_cast<std::size_t>(N));
  std::vector<double> clipped(static_cast<std::size_t>(N), 0.0);
#pragma omp parallel for schedule(static)
  for (Index t = 1; t <= N; ++t) {
    MatrixFactor f = psd_factor(pooled_field.at(t));
    factors[static_cast<std::size_t>(t - 1)] = std::move(f.root);
    clipped[static_cast<std::size_t>(t - 1)] = f.clipped_mass;
  }
  double total = 0.0;
  for (double c : clipped) total += c;
  return PsdFactor(pooled_field.frequencies(), pooled_field.grid(),
                   std::move(factors), total);
}

namespace {

DftField draw_pseudo_dft(const PsdFactor& factor, Rng& rng) {
  const FrequencyGrid& freq = factor.frequencies();
  const Index N = freq.half_count();
  const Index k = factor.grid_size();
  std::normal_distribution<double> normal;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  ComplexRowMatrix table = ComplexRowMatrix::Zero(freq.count(), k);
  ComplexVector z(k);
  for (Index t = 1; t <= N; ++t) {
    for (Index i = 0; i < k; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i) = {re * inv_sqrt2, im * inv_sqrt2};
    }
    const ComplexVector j = factor.at(t) * z;
    table.row(freq.slot(t)) = j.transpose();
    table.row(freq.slot(-t)) = j.conjugate().transpose();
  }
  return DftField(freq, factor.grid(), std::move(table));
}

}  // namespace

std::pair<DftField, DftField> sample_pseudo_dfts(const PsdFactor& factor,
                                                 Rng& rng) {
  DftField x = draw_pseudo_dft(factor, rng);
  DftField y = draw_pseudo_dft(factor, rng);
  return {std::move(x), std::move(y)};
}

std::optional<ReplicateStats> bootstrap_replicate(const PsdFactor& factor,
                                                  const WeightKernel& kernel,
                                                  double bandwidth,
                                                  const DataConstants& data,
                                                  Rng& rng) {
  const auto [jx, jy] = sample_pseudo_dfts(factor, rng);
  const SpectralKernelField fx = smooth(jx, kernel, bandwidth);
  const SpectralKernelField fy = smooth(jy, kernel, bandwidth);
  const SpectralKernelField pool = pooled(fx, fy);

  ReplicateStats r;
  r.u_stat = hs_distance_integral(fx, fy);
  r.mu0_hat = mu0_hat(pool, kernel);
  try {
    r.theta0_hat = theta0_hat(pool, kernel);
  } catch (const NumericError&) {
    return std::nullopt;
  }
  const Index T = factor.frequencies().sample_length();
  r.t_star =
      studentized_value(r.u_stat, r.mu0_hat, r.theta0_hat, T, bandwidth);
  r.t_plus = data.theta0_hat > 0.0
                 ? studentized_value(r.u_stat, data.mu0_hat, data.theta0_hat,
                                     T, bandwidth)
                 : r.t_star;
  return r;
}

std::optional<BootstrapStatistic> parse_statistic(std::string_view name) {
  if (name == "t_star") return BootstrapStatistic::t_star;
  if (name == "t_plus") return BootstrapStatistic::t_plus;
  return std::nullopt;
}

std::string_view to_string(BootstrapStatistic statistic) {
  return statistic == BootstrapStatistic::t_star ? "t_star" : "t_plus";
}

double BootstrapOutcome::critical_value(double alpha) const {
  for (const auto& cv : critical_values) {
    if (cv.alpha == alpha) return cv.value;
  }
  throw InputError("no critical value recorded for alpha=" +
                   std::to_string(alpha));
}

double bootstrap_p_value(const std::vector<double>& replicates,
                         double observed) {
  const auto at_least = std::count_if(
      replicates.begin(), replicates.end(),
      [observed](double r) { return r >= observed; });
  return (1.0 + static_cast<double>(at_least)) /
         (static_cast<double>(replicates.size()) + 1.0);
}

double upper_critical_value(std::vector<double> replicates, double alpha) {
  if (replicates.empty()) throw InputError("no bootstrap replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("alpha must lie in (0,1)");
  }
  std::sort(replicates.begin(), replicates.end());
  const auto B = static_cast<double>(replicates.size());
  // Guard against (1 - alpha) * B landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * B - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, replicates.size());
  return replicates[rank - 1];
}

BootstrapOutcome run_bootstrap(const SpectralKernelField& fx,
                               const SpectralKernelField& fy,
                               const WeightKernel& kernel, double observed,
                               const BootstrapOptions& options) {
  if (options.replicates < 99) {
    throw InputError("bootstrap needs B >= 99");
  }
  if (!std::isfinite(observed)) {
    throw InputError("observed statistic must be finite");
  }
  require_matching(fx, fy);
  const SpectralKernelField pool = pooled(fx, fy);
  const PsdFactor factor = psd_factorize(pool);
  const DataConstants data{mu0_hat(pool, kernel), theta0_hat(pool, kernel)};
  const double bandwidth = fx.bandwidth();

  const Index B = options.replicates;
  const auto max_rejections = static_cast<Index>(0.01 * static_cast<double>(B));
  std::vector<ReplicateStats> stats(static_cast<std::size_t>(B));
  std::vector<Index> rejections(static_cast<std::size_t>(B), 0);
  std::vector<char> completed(static_cast<std::size_t>(B), 0);

#pragma omp parallel for schedule(dynamic)
  for (Index b = 0; b < B; ++b) {
    Rng rng = make_rng(options.master_seed, "bootstrap",
                       static_cast<std::uint64_t>(b));
    const auto slot = static_cast<std::size_t>(b);
    for (Index attempt = 0; attempt <= max_rejections; ++attempt) {
      if (auto r = bootstrap_replicate(factor, kernel, bandwidth, data, rng)) {
        stats[slot] = *r;
        completed[slot] = 1;
        break;
      }
      ++rejections[slot];
    }
  }

  BootstrapOutcome out;
  for (Index r : rejections) out.rejected_draws += r;
  const bool all_done =
      std::all_of(completed.begin(), completed.end(), [](char c) { return c; });
  if (!all_done || out.rejected_draws > max_rejections) {
    throw NumericError(
        "bootstrap aborted: " + std::to_string(out.rejected_draws) +
        " degenerate draws (theta0* = 0) exceed 1% of B=" + std::to_string(B) +
        "; pooled spectral estimate clipped mass " +
        std::to_string(factor.clipped_mass()));
  }

  out.t_star.reserve(stats.size());
  out.t_plus.reserve(stats.size());
  for (const auto& s : stats) {
    out.t_star.push_back(s.t_star);
    out.t_plus.push_back(s.t_plus);
  }
  out.statistic = options.statistic;
  out.observed = observed;
  out.master_seed = options.master_seed;
  out.replicates = B;
  out.clipped_mass = factor.clipped_mass();
  out.p_value = bootstrap_p_value(out.decision_replicates(), observed);

  std::vector<double> alphas = options.alphas;
  std::sort(alphas.begin(), alphas.end());
  for (double a : alphas) {
    out.critical_values.push_back(
        {a, upper_critical_value(out.decision_replicates(), a)});
  }
  return out;
}

}  // namespace specop
