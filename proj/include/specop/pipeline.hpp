#pragma once

// End-to-end two-sample test: center -> dft -> (cv) -> smooth -> studentize
// -> bootstrap. Shared by the CLI and the simulation lab so both make the
// same decision on the same inputs.

#include "specop/bandwidth_cv.hpp"
#include "specop/bootstrap.hpp"
#include "specop/core_model.hpp"
#include "specop/statistic.hpp"

#include <optional>
#include <vector>

namespace specop {

struct AnalysisOptions {
  /// nullopt selects the bandwidth by cross-validation over `cv_grid`.
  std::optional<double> bandwidth = 0.1;
  std::vector<double> cv_grid = default_cv_grid();
  KernelName kernel = KernelName::epanechnikov_pi;
  /// nullopt skips the bootstrap (statistic only).
  std::optional<BootstrapOptions> bootstrap = BootstrapOptions{};
  /// Without a bootstrap, decide against N(0,1) quantiles at these levels.
  /// The normal limit is slow to kick in, so this is a rough screen only.
  std::vector<double> asymptotic_alphas;
};

struct Decision {
  double alpha = 0.0;
  double critical_value = 0.0;
  bool reject = false;
};

struct TwoSampleTest {
  Index sample_length = 0;
  Index grid_size = 0;
  std::vector<double> grid;
  double bandwidth = 0.0;
  std::optional<CvCurve> cv_curve;
  StudentizedResult statistic;
  std::optional<BootstrapOutcome> bootstrap;
  /// 1 - Phi(t_stat); set when deciding against the normal limit.
  std::optional<double> asymptotic_p_value;
  /// t_stat >= critical value, one per alpha.
  std::vector<Decision> decisions;
};

/// Both samples are centered independently before analysis. Throws
/// InputError on shape/grid mismatch and NumericError on degenerate data.
TwoSampleTest run_two_sample_test(const FunctionalSample& x,
                                  const FunctionalSample& y,
                                  const AnalysisOptions& options);

}  // namespace specop
