#include "specop/pipeline.hpp"

#include <algorithm>

#include "specop/error.hpp"
#include "specop/spectral.hpp"

#include <boost/math/distributions/normal.hpp>

namespace specop {

TwoSampleTest run_two_sample_test(const FunctionalSample& x,
                                  const FunctionalSample& y,
                                  const AnalysisOptions& options) {
  if (x.length() != y.length() || x.grid_size() != y.grid_size()) {
    throw InputError("samples differ in shape: X is " +
                     std::to_string(x.length()) + "x" +
                     std::to_string(x.grid_size()) + ", Y is " +
                     std::to_string(y.length()) + "x" +
                     std::to_string(y.grid_size()));
  }
  if (x.grid() != y.grid()) {
    throw InputError("samples are observed on different grids");
  }
  const WeightKernel kernel = make_weight_kernel(options.kernel);
  const DftField jx = dft(center(x));
  const DftField jy = dft(center(y));

  TwoSampleTest out;
  out.sample_length = x.length();
  out.grid_size = x.grid_size();
  out.grid = x.grid();
  if (options.bandwidth) {
    out.bandwidth = *options.bandwidth;
  } else {
    out.cv_curve = select_bandwidth(jx, jy, kernel, options.cv_grid);
    out.bandwidth = out.cv_curve->selected;
  }

  const SpectralKernelField fx = smooth(jx, kernel, out.bandwidth);
  const SpectralKernelField fy = smooth(jy, kernel, out.bandwidth);
  out.statistic = studentize(fx, fy, kernel);

  if (options.bootstrap) {
    out.bootstrap = run_bootstrap(fx, fy, kernel, out.statistic.t_stat,
                                  *options.bootstrap);
    for (const auto& cv : out.bootstrap->critical_values) {
      out.decisions.push_back(
          {cv.alpha, cv.value, out.statistic.t_stat >= cv.value});
    }
  } else if (!options.asymptotic_alphas.empty()) {
    const boost::math::normal standard;
    out.asymptotic_p_value = cdf(complement(standard, out.statistic.t_stat));
    std::vector<double> alphas = options.asymptotic_alphas;
    std::sort(alphas.begin(), alphas.end());
    for (double alpha : alphas) {
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("alpha values must lie in (0,1)");
      }
      const double z = quantile(complement(standard, alpha));
      out.decisions.push_back({alpha, z, out.statistic.t_stat >= z});
    }
  }
  return out;
}

}  // namespace specop
