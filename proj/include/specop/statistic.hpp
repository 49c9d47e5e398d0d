#pragma once

// The L2-type distance between two estimated spectral density operators,
// its plug-in centering/scaling constants and the per-frequency breakdown.
//
// Every integral over lambda is the Riemann sum (2 pi / T) sum_{l != 0} over
// Fourier frequencies and every integral over [0,1]^2 is the grid average
// (1/k^2) sum_{i,j}. The bootstrap reuses these exact functions.

#include "specop/core_model.hpp"

#include <vector>

namespace specop {

struct FrequencyContribution {
  double lambda = 0.0;
  double q = 0.0;
};

struct StudentizedResult {
  double u_stat = 0.0;
  double mu0_hat = 0.0;
  double theta0_hat = 0.0;
  double t_stat = 0.0;
  double bandwidth = 0.0;
  /// j = 0..N
  std::vector<FrequencyContribution> per_frequency_q;
};

/// (2 pi / T) sum_{l != 0} (1/k^2) sum_{i,j} |F_X,l(i,j) - F_Y,l(i,j)|^2
double hs_distance_integral(const SpectralKernelField& fx,
                            const SpectralKernelField& fy);

/// (1/pi) [(2 pi / T) sum_{l != 0} tr_l^2] kappa2 with
/// tr_l = (1/k) sum_i Re F_l(i,i).
double mu0_hat(const SpectralKernelField& pooled_field,
               const WeightKernel& kernel);

/// sqrt((2/pi^2) conv_sq_integral [(2 pi / T) sum_{l != 0} S_l^2]) with
/// S_l = (1/k^2) sum_{i,j} F_l(i,j)^2 (complex square; real for Hermitian
/// F_l). Throws NumericError when the result is 0.
double theta0_hat(const SpectralKernelField& pooled_field,
                  const WeightKernel& kernel);

/// (sqrt(b) T u - b^{-1/2} mu0) / theta0
double studentized_value(double u_stat, double mu0, double theta0,
                         Index sample_length, double bandwidth);

/// Q_j = 2 pi sqrt(b) (1/k^2) sum |F_X,j - F_Y,j|^2 / theta0 for j = 0..N.
/// Since the l = 0 term is excluded from u_stat,
/// sum_{j>=1} 2 Q_j = sqrt(b) T u_stat / theta0.
std::vector<FrequencyContribution> q_decomposition(
    const SpectralKernelField& fx, const SpectralKernelField& fy,
    double theta0, double bandwidth);

/// Weight of Q_j in the identity above: 0 for j = 0, 2 otherwise.
inline double q_weight(Index j) { return j == 0 ? 0.0 : 2.0; }

/// Pools the two fields and assembles the full result.
StudentizedResult studentize(const SpectralKernelField& fx,
                             const SpectralKernelField& fy,
                             const WeightKernel& kernel);

}  // namespace specop
