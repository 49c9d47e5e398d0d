#pragma once

// Shared data model: grid-sampled functional samples, Fourier frequency
// grids, smoothing kernels and per-frequency spectral kernel matrices.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specop {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// T curves observed on a common grid of k points in [0,1]. Row t of
/// `values()` is the curve X_t evaluated at the grid.
class FunctionalSample {
 public:
  /// Validates T >= 4, k >= 2, a strictly increasing grid inside [0,1],
  /// finite values, and zero column means when `centered` is set.
  /// Throws InputError on violation.
  FunctionalSample(RealMatrix values, std::vector<double> grid,
                   bool centered = false);

  /// Same, with k equidistant grid points including both endpoints.
  static FunctionalSample on_uniform_grid(RealMatrix values,
                                          bool centered = false);

  Index length() const { return values_.rows(); }
  Index grid_size() const { return values_.cols(); }
  const RealMatrix& values() const { return values_; }
  const std::vector<double>& grid() const { return grid_; }
  bool centered() const { return centered_; }

  /// True when consecutive grid spacings agree to `rel_tol`.
  bool has_equidistant_grid(double rel_tol = 1e-6) const;

 private:
  RealMatrix values_;
  std::vector<double> grid_;
  bool centered_;
};

/// k equidistant points 0, 1/(k-1), ..., 1.
std::vector<double> uniform_grid(Index k);

/// Subtracts each column's mean. Works on any shape, including samples
/// too short to form a FunctionalSample.
RealMatrix center_columns(const RealMatrix& values);

/// Returns a copy with every column mean removed and the centered flag set.
FunctionalSample center(const FunctionalSample& sample);

/// Fourier frequencies lambda_t = 2*pi*t/T for t = -N..N, N = floor((T-1)/2).
class FrequencyGrid {
 public:
  explicit FrequencyGrid(Index sample_length);

  Index sample_length() const { return T_; }
  Index half_count() const { return N_; }
  /// 2N + 1
  Index count() const { return 2 * N_ + 1; }
  /// Storage slot of frequency index t (t = -N maps to 0).
  Index slot(Index t) const { return t + N_; }
  bool contains(Index t) const { return t >= -N_ && t <= N_; }

  double lambda(Index t) const;

  /// (l - t) reduced modulo T into (-T/2, T/2]; the signed number of
  /// frequency steps on the circle between lambda_l and lambda_t.
  Index circular_offset(Index l, Index t) const;
  /// Shortest signed circular distance lambda_l - lambda_t in (-pi, pi].
  double circular_distance(Index l, Index t) const;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  Index T_;
  Index N_;
};

enum class KernelName { epanechnikov_pi, uniform_pi };

std::optional<KernelName> parse_kernel_name(std::string_view name);
std::string_view to_string(KernelName name);

/// Symmetric nonnegative smoothing weight supported on [-pi, pi] with
/// integral 2*pi, together with the two constants the studentization needs.
///
/// uniform-pi is not Lipschitz at +-pi and is meant for testing only.
class WeightKernel {
 public:
  KernelName name() const { return name_; }
  double operator()(double x) const;
  double support_radius() const { return kPi; }
  /// Integral of W^2 over [-pi, pi].
  double kappa2() const { return kappa2_; }
  /// Integral over [-2pi, 2pi] of (integral of W(u) W(u - x) du)^2 dx.
  double conv_sq_integral() const { return conv_sq_integral_; }
  /// Integral of W over [-pi, pi] as measured by quadrature at construction.
  double mass() const { return mass_; }

 private:
  friend WeightKernel make_weight_kernel(KernelName);
  explicit WeightKernel(KernelName name) : name_(name) {}

  KernelName name_;
  double kappa2_ = 0.0;
  double conv_sq_integral_ = 0.0;
  double mass_ = 0.0;
};

/// Builds a kernel and computes its constants by adaptive quadrature.
/// Throws NumericError if the quadrature mass differs from 2*pi by > 1e-8.
WeightKernel make_weight_kernel(KernelName name);
/// Throws InputError for unrecognized names.
WeightKernel make_weight_kernel(std::string_view name);

/// For each Fourier frequency index t in -N..N, a k x k complex matrix
/// approximating the spectral density kernel f_{lambda_t}(s_i, s_j).
class SpectralKernelField {
 public:
  /// `entries` is indexed by FrequencyGrid::slot. Shapes are validated
  /// (InputError); structural invariants are not, see invariant_violation.
  SpectralKernelField(FrequencyGrid frequencies, std::vector<double> grid,
                      double bandwidth, std::vector<ComplexMatrix> entries);

  const FrequencyGrid& frequencies() const { return frequencies_; }
  const std::vector<double>& grid() const { return grid_; }
  double bandwidth() const { return bandwidth_; }
  Index grid_size() const { return static_cast<Index>(grid_.size()); }
  Index half_count() const { return frequencies_.half_count(); }

  const ComplexMatrix& at(Index t) const;
  std::span<const ComplexMatrix> entries() const { return entries_; }

  /// Describes the first violated invariant (Hermitian per frequency,
  /// F_{-t} = conj(F_t), real nonnegative diagonal), or nullopt.
  std::optional<std::string> invariant_violation(double tol = 1e-10) const;

 private:
  FrequencyGrid frequencies_;
  std::vector<double> grid_;
  double bandwidth_;
  std::vector<ComplexMatrix> entries_;
};

/// Throws InputError unless both fields share frequencies, grid and bandwidth.
void require_matching(const SpectralKernelField& a,
                      const SpectralKernelField& b);

}  // namespace specop
