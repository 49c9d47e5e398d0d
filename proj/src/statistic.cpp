#include "specop/statistic.hpp"

#include "specop/error.hpp"
#include "specop/spectral.hpp"

#include <cmath>

namespace specop {

namespace {

// Riemann weight of one Fourier frequency: 2 pi / T.
double frequency_step(const SpectralKernelField& f) {
  return kTwoPi / static_cast<double>(f.frequencies().sample_length());
}

double grid_average_sq_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double k = static_cast<double>(a.rows());
  return (a - b).squaredNorm() / (k * k);
}

// S_l: grid average of the complex square F(i,j)^2.
double grid_average_square(const ComplexMatrix& F) {
  const double k = static_cast<double>(F.rows());
  const std::complex<double> s = F.cwiseProduct(F).sum() / (k * k);
  const double scale = F.squaredNorm() / (k * k);
  if (std::abs(s.imag()) > 1e-8 * (1.0 + scale)) {
    throw NumericError("grid average of f^2 is not real; field not Hermitian");
  }
  return s.real();
}

}  // namespace

double hs_distance_integral(const SpectralKernelField& fx,
                            const SpectralKernelField& fy) {
  require_matching(fx, fy);
  const Index N = fx.half_count();
  double sum = 0.0;
  for (Index l = -N; l <= N; ++l) {
    if (l == 0) continue;
    sum += grid_average_sq_diff(fx.at(l), fy.at(l));
  }
  return frequency_step(fx) * sum;
}

double mu0_hat(const SpectralKernelField& pooled_field,
               const WeightKernel& kernel) {
  const Index N = pooled_field.half_count();
  const double k = static_cast<double>(pooled_field.grid_size());
  double sum = 0.0;
  for (Index l = -N; l <= N; ++l) {
    if (l == 0) continue;
    const double trace = pooled_field.at(l).diagonal().real().sum() / k;
    sum += trace * trace;
  }
  return frequency_step(pooled_field) * sum * kernel.kappa2() / kPi;
}

double theta0_hat(const SpectralKernelField& pooled_field,
                  const WeightKernel& kernel) {
  const Index N = pooled_field.half_count();
  double sum = 0.0;
  for (Index l = -N; l <= N; ++l) {
    if (l == 0) continue;
    const double s = grid_average_square(pooled_field.at(l));
    sum += s * s;
  }
  const double theta_sq = 2.0 / (kPi * kPi) * kernel.conv_sq_integral() *
                          frequency_step(pooled_field) * sum;
  if (!(theta_sq > 0.0) || !std::isfinite(theta_sq)) {
    throw NumericError(
        "degenerate spectral estimate: theta0 is zero, studentization "
        "undefined");
  }
  return std::sqrt(theta_sq);
}

double studentized_value(double u_stat, double mu0, double theta0,
                         Index sample_length, double bandwidth) {
  const double root_b = std::sqrt(bandwidth);
  return (root_b * static_cast<double>(sample_length) * u_stat -
          mu0 / root_b) /
         theta0;
}

std::vector<FrequencyContribution> q_decomposition(
    const SpectralKernelField& fx, const SpectralKernelField& fy,
    double theta0, double bandwidth) {
  require_matching(fx, fy);
  if (!(theta0 > 0.0)) {
    throw InputError("q decomposition needs theta0 > 0");
  }
  const Index N = fx.half_count();
  const double factor = kTwoPi * std::sqrt(bandwidth) / theta0;
  std::vector<FrequencyContribution> out;
  out.reserve(static_cast<std::size_t>(N + 1));
  for (Index j = 0; j <= N; ++j) {
    out.push_back({fx.frequencies().lambda(j),
                   factor * grid_average_sq_diff(fx.at(j), fy.at(j))});
  }
  return out;
}

StudentizedResult studentize(const SpectralKernelField& fx,
                             const SpectralKernelField& fy,
                             const WeightKernel& kernel) {
  require_matching(fx, fy);
  const SpectralKernelField pool = pooled(fx, fy);
  StudentizedResult r;
  r.bandwidth = fx.bandwidth();
  r.u_stat = hs_distance_integral(fx, fy);
  r.mu0_hat = mu0_hat(pool, kernel);
  r.theta0_hat = theta0_hat(pool, kernel);
  r.t_stat = studentized_value(r.u_stat, r.mu0_hat, r.theta0_hat,
                               fx.frequencies().sample_length(), r.bandwidth);
  r.per_frequency_q = q_decomposition(fx, fy, r.theta0_hat, r.bandwidth);
  return r;
}

}  // namespace specop
