#pragma once

// Leave-one-out cross-validation of the smoothing bandwidth, computed on the
// grid-averaged pooled periodogram.

#include "specop/core_model.hpp"
#include "specop/spectral.hpp"

#include <vector>

namespace specop {

struct CvCurve {
  std::vector<double> candidates;
  std::vector<double> scores;  // +inf marks an inadmissible bandwidth
  double selected = 0.0;
};

/// I_T(lambda_t) for t = 1..N (values[t - 1]): the (1/k^2) grid average of
/// the pooled periodogram kernel (p_X + p_Y) / 2.
struct AveragedPeriodogram {
  Index sample_length = 0;
  std::vector<double> values;
};

AveragedPeriodogram averaged_periodogram(const DftField& dft_x,
                                         const DftField& dft_y);

inline constexpr double kCvFloor = 1e-12;

/// CV(b) = (1/N) sum_{t=1}^{N} [ log g_{-t}(lambda_t) + I_T(lambda_t) / g_{-t} ]
/// where g_{-t} smooths I_T over all s != +-t (and s != 0). Returns +inf when
/// any g_{-t} <= kCvFloor. Throws InputError for b outside (0,1).
double cv_score(const AveragedPeriodogram& periodogram,
                const WeightKernel& kernel, double bandwidth);

/// 12 log-spaced values in [0.02, 0.5].
std::vector<double> default_cv_grid();

/// Scores every candidate and picks the smallest score, ties going to the
/// smaller bandwidth. Throws NumericError if no candidate is admissible.
CvCurve select_bandwidth(const DftField& dft_x, const DftField& dft_y,
                         const WeightKernel& kernel,
                         std::vector<double> candidates);

}  // namespace specop
