#pragma once

// Finite Fourier transforms, periodogram kernels and kernel-smoothed
// spectral density kernel estimates on the observation grid.

#include "specop/core_model.hpp"

#include <vector>

namespace specop {

using ComplexRowMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic,
                  Eigen::RowMajor>;

/// J_t for t = -N..N. Row slot(t) of `table()` holds the k values
/// J_{lambda_t}(s_1), ..., J_{lambda_t}(s_k).
class DftField {
 public:
  /// Throws InputError on shape mismatch. Conjugate symmetry is the
  /// producer's responsibility (dft and the bootstrap sampler both reflect).
  DftField(FrequencyGrid frequencies, std::vector<double> grid,
           ComplexRowMatrix table);

  const FrequencyGrid& frequencies() const { return frequencies_; }
  const std::vector<double>& grid() const { return grid_; }
  Index grid_size() const { return table_.cols(); }
  Index half_count() const { return frequencies_.half_count(); }
  const ComplexRowMatrix& table() const { return table_; }

  /// J_t as a row; throws InputError when t is outside -N..N.
  ComplexRowMatrix::ConstRowXpr at(Index t) const;

 private:
  FrequencyGrid frequencies_;
  std::vector<double> grid_;
  ComplexRowMatrix table_;
};

/// J_t[i] = (2 pi T)^{-1/2} sum_{u=1}^{T} X_u(s_i) exp(-i u lambda_t), by FFT
/// along time for each grid column. Requires a centered sample.
DftField dft(const FunctionalSample& sample);

/// Rank-one matrix J_t J_t^H.
ComplexMatrix periodogram_kernel(const DftField& dft, Index t);

/// F_l = (bT)^{-1} sum_{t=-N}^{N} W(d(lambda_l, lambda_t) / b) J_t J_t^H for
/// every Fourier frequency l, with d the signed circular distance.
/// Frequencies are processed in parallel; the result does not depend on the
/// thread count. Requires 0 < bandwidth < 1.
SpectralKernelField smooth(const DftField& dft, const WeightKernel& kernel,
                           double bandwidth);

/// (F_X + F_Y) / 2 per frequency.
SpectralKernelField pooled(const SpectralKernelField& fx,
                           const SpectralKernelField& fy);

namespace reference {

/// Serial, literal form of smooth(): full periodogram matrices summed over
/// all t for every l. Kept as the oracle for the parallel kernel.
SpectralKernelField smooth(const DftField& dft, const WeightKernel& kernel,
                           double bandwidth);

}  // namespace reference

/// Number of threads the OpenMP kernels will use (1 without OpenMP).
int available_threads();

}  // namespace specop
