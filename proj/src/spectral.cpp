#include "specop/spectral.hpp"

#include "specop/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace specop {

namespace {

void require_bandwidth(double bandwidth) {
  if (!(bandwidth > 0.0 && bandwidth < 1.0)) {
    throw InputError("bandwidth must lie in (0,1), got " +
                     std::to_string(bandwidth));
  }
}

// Weight W(d/b) for every circular offset m in (-T/2, T/2], stored at m + T/2.
std::vector<double> offset_weights(const FrequencyGrid& freq,
                                   const WeightKernel& kernel,
                                   double bandwidth) {
  const Index T = freq.sample_length();
  std::vector<double> w(static_cast<std::size_t>(T + 1), 0.0);
  for (Index t = -T / 2; t <= T / 2; ++t) {
    // circular_distance(t, 0) is 2*pi*m/T with the same rounding as any
    // other (l, l - m) pair.
    w[static_cast<std::size_t>(t + T / 2)] =
        kernel(freq.circular_distance(t, 0) / bandwidth);
  }
  return w;
}

}  // namespace

DftField::DftField(FrequencyGrid frequencies, std::vector<double> grid,
                   ComplexRowMatrix table)
    : frequencies_(frequencies), grid_(std::move(grid)), table_(std::move(table)) {
  if (table_.rows() != frequencies_.count()) {
    throw InputError("DFT table needs one row per Fourier frequency");
  }
  if (table_.cols() != static_cast<Index>(grid_.size())) {
    throw InputError("DFT table width does not match the grid");
  }
}

ComplexRowMatrix::ConstRowXpr DftField::at(Index t) const {
  if (!frequencies_.contains(t)) {
    throw InputError("frequency index " + std::to_string(t) +
                     " outside -N..N");
  }
  return table_.row(frequencies_.slot(t));
}

DftField dft(const FunctionalSample& sample) {
  if (!sample.centered()) {
    throw InputError(
        "dft requires a centered sample (uncentered data leak the mean into "
        "low-frequency periodograms)");
  }
  const Index T = sample.length();
  const Index k = sample.grid_size();
  const FrequencyGrid freq(T);
  const Index N = freq.half_count();
  const double scale = 1.0 / std::sqrt(kTwoPi * static_cast<double>(T));

  ComplexRowMatrix table(freq.count(), k);
  Eigen::FFT<double> fft;
  std::vector<double> column(static_cast<std::size_t>(T));
  std::vector<std::complex<double>> spectrum;
  for (Index i = 0; i < k; ++i) {
    for (Index u = 0; u < T; ++u) {
      column[static_cast<std::size_t>(u)] = sample.values()(u, i);
    }
    fft.fwd(spectrum, column);
    for (Index t = 0; t <= N; ++t) {
      // Time runs 1..T, the FFT's 0..T-1: shift by one step.
      const double phase = -freq.lambda(t);
      const std::complex<double> shift(std::cos(phase), std::sin(phase));
      const std::complex<double> value =
          scale * shift * spectrum[static_cast<std::size_t>(t)];
      table(freq.slot(t), i) = value;
      table(freq.slot(-t), i) = std::conj(value);
    }
    table(freq.slot(0), i) = {table(freq.slot(0), i).real(), 0.0};
  }
  return DftField(freq, sample.grid(), std::move(table));
}

ComplexMatrix periodogram_kernel(const DftField& dft, Index t) {
  const auto row = dft.at(t);
  return row.transpose() * row.conjugate();
}

SpectralKernelField smooth(const DftField& dft, const WeightKernel& kernel,
                           double bandwidth) {
  require_bandwidth(bandwidth);
  const FrequencyGrid& freq = dft.frequencies();
  const Index T = freq.sample_length();
  const Index N = freq.half_count();
  const Index k = dft.grid_size();
  const double norm = 1.0 / (bandwidth * static_cast<double>(T));
  const auto weights = offset_weights(freq, kernel, bandwidth);

  std::vector<ComplexMatrix> entries(static_cast<std::size_t>(freq.count()));

  // Offsets with nonzero weight; the window is the same for every l.
  std::vector<Index> offsets;
  std::vector<double> roots;
  for (Index m = -(T / 2) + (T % 2 == 0 ? 1 : 0); m <= T / 2; ++m) {
    const double w = weights[static_cast<std::size_t>(m + T / 2)];
    if (w != 0.0) {
      offsets.push_back(m);
      roots.push_back(std::sqrt(w));
    }
  }
  const Index n = static_cast<Index>(offsets.size());

  // Each l >= 0 is owned by one iteration; F_{-l} is its conjugate.
  // Stacking sqrt(w) J_t as rows of B turns the weighted sum of rank-one
  // terms into one B^T conj(B) product.
#pragma omp parallel for schedule(static)
  for (Index l = 0; l <= N; ++l) {
    ComplexMatrix acc = ComplexMatrix::Zero(k, k);
    ComplexRowMatrix B(n, k);
    Index rows = 0;
    for (Index i = 0; i < n; ++i) {
      // Frequency at circular offset m from l, folded back into -N..N.
      Index t = l - offsets[static_cast<std::size_t>(i)];
      if (t > N) t -= T;
      if (t < -N) t += T;
      if (t < -N || t > N) continue;  // Nyquist slot of even T
      B.row(rows++) = roots[static_cast<std::size_t>(i)] * dft.at(t);
    }
    if (rows > 0) {
      acc.selfadjointView<Eigen::Upper>().rankUpdate(
          B.topRows(rows).transpose());
    }
    acc *= norm;
    for (Index c = 0; c < k; ++c) {
      acc(c, c) = {acc(c, c).real(), 0.0};
      for (Index r = c + 1; r < k; ++r) acc(r, c) = std::conj(acc(c, r));
    }
    entries[static_cast<std::size_t>(freq.slot(-l))] = acc.conjugate();
    entries[static_cast<std::size_t>(freq.slot(l))] = std::move(acc);
  }
  return SpectralKernelField(freq, dft.grid(), bandwidth, std::move(entries));
}

SpectralKernelField pooled(const SpectralKernelField& fx,
                           const SpectralKernelField& fy) {
  require_matching(fx, fy);
  std::vector<ComplexMatrix> entries;
  entries.reserve(fx.entries().size());
  for (std::size_t s = 0; s < fx.entries().size(); ++s) {
    entries.push_back(0.5 * (fx.entries()[s] + fy.entries()[s]));
  }
  return SpectralKernelField(fx.frequencies(), fx.grid(), fx.bandwidth(),
                             std::move(entries));
}

namespace reference {

SpectralKernelField smooth(const DftField& dft, const WeightKernel& kernel,
                           double bandwidth) {
  require_bandwidth(bandwidth);
  const FrequencyGrid& freq = dft.frequencies();
  const Index N = freq.half_count();
  const Index k = dft.grid_size();
  const double bT = bandwidth * static_cast<double>(freq.sample_length());

  std::vector<ComplexMatrix> entries;
  entries.reserve(static_cast<std::size_t>(freq.count()));
  for (Index l = -N; l <= N; ++l) {
    ComplexMatrix F = ComplexMatrix::Zero(k, k);
    for (Index t = -N; t <= N; ++t) {
      const double w = kernel(freq.circular_distance(l, t) / bandwidth);
      F += w * periodogram_kernel(dft, t);
    }
    entries.push_back(F / bT);
  }
  return SpectralKernelField(freq, dft.grid(), bandwidth, std::move(entries));
}

}  // namespace reference

int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace specop
