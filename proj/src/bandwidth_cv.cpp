#include "specop/bandwidth_cv.hpp"

#include "specop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace specop {

AveragedPeriodogram averaged_periodogram(const DftField& dft_x,
                                         const DftField& dft_y) {
  if (!(dft_x.frequencies() == dft_y.frequencies()) ||
      dft_x.grid_size() != dft_y.grid_size()) {
    throw InputError("averaged periodogram needs DFTs of equal shape");
  }
  const Index N = dft_x.half_count();
  const double k = static_cast<double>(dft_x.grid_size());
  AveragedPeriodogram out{dft_x.frequencies().sample_length(),
                          std::vector<double>(static_cast<std::size_t>(N))};
  for (Index t = 1; t <= N; ++t) {
    // (1/k^2) sum_{r,s} J[r] conj(J[s]) = |sum_r J[r]|^2 / k^2
    const std::complex<double> sx = dft_x.at(t).sum();
    const std::complex<double> sy = dft_y.at(t).sum();
    out.values[static_cast<std::size_t>(t - 1)] =
        0.5 * (std::norm(sx) + std::norm(sy)) / (k * k);
  }
  return out;
}

double cv_score(const AveragedPeriodogram& periodogram,
                const WeightKernel& kernel, double bandwidth) {
  if (!(bandwidth > 0.0 && bandwidth < 1.0)) {
    throw InputError("CV bandwidth must lie in (0,1), got " +
                     std::to_string(bandwidth));
  }
  const FrequencyGrid freq(periodogram.sample_length);
  const Index N = freq.half_count();
  if (N == 0 || static_cast<Index>(periodogram.values.size()) != N) {
    throw InputError("averaged periodogram does not match its sample length");
  }
  const double bT = bandwidth * static_cast<double>(freq.sample_length());
  const auto value = [&](Index s) {
    return periodogram.values[static_cast<std::size_t>((s < 0 ? -s : s) - 1)];
  };

  double total = 0.0;
  for (Index t = 1; t <= N; ++t) {
    double g = 0.0;
    for (Index s = -N; s <= N; ++s) {
      if (s == 0 || s == t || s == -t) continue;
      const double w = kernel(freq.circular_distance(t, s) / bandwidth);
      if (w != 0.0) g += w * value(s);
    }
    g /= bT;
    if (!(g > kCvFloor)) return std::numeric_limits<double>::infinity();
    total += std::log(g) + value(t) / g;
  }
  return total / static_cast<double>(N);
}

std::vector<double> default_cv_grid() {
  constexpr int count = 12;
  const double lo = std::log(0.02);
  const double hi = std::log(0.5);
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  grid.front() = 0.02;
  grid.back() = 0.5;
  return grid;
}

CvCurve select_bandwidth(const DftField& dft_x, const DftField& dft_y,
                         const WeightKernel& kernel,
                         std::vector<double> candidates) {
  if (candidates.empty()) {
    throw InputError("bandwidth grid is empty");
  }
  for (double b : candidates) {
    if (!(b > 0.0 && b < 1.0)) {
      throw InputError("bandwidth candidates must lie in (0,1)");
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  const auto periodogram = averaged_periodogram(dft_x, dft_y);
  CvCurve curve;
  curve.candidates = candidates;
  curve.scores.resize(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    curve.scores[i] = cv_score(periodogram, kernel, candidates[i]);
  }

  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isfinite(curve.scores[i])) continue;
    if (best == candidates.size() || curve.scores[i] < curve.scores[best]) {
      best = i;
    }
  }
  if (best == candidates.size()) {
    throw NumericError("no admissible bandwidth: every CV score is infinite");
  }
  curve.selected = candidates[best];
  return curve;
}

}  // namespace specop
