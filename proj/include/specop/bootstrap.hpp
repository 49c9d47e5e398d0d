#pragma once

// Frequency-domain bootstrap: independent circularly-symmetric complex
// Gaussian pseudo-DFTs drawn from the pooled spectral estimate at each
// positive Fourier frequency, smoothed and studentized exactly like the data.

#include "specop/core_model.hpp"
#include "specop/seeding.hpp"
#include "specop/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace specop {

/// Hermitian square root of the PSD projection of one k x k matrix.
struct MatrixFactor {
  ComplexMatrix root;          // root * root^H == clipped matrix
  double clipped_mass = 0.0;   // sum of |negative eigenvalues| removed
};

/// Throws InputError if `hermitian` is not Hermitian within 1e-10 (relative).
MatrixFactor psd_factor(const ComplexMatrix& hermitian);

/// One factor A_t per positive frequency t = 1..N.
class PsdFactor {
 public:
  PsdFactor(FrequencyGrid frequencies, std::vector<double> grid,
            std::vector<ComplexMatrix> factors, double clipped_mass);

  const FrequencyGrid& frequencies() const { return frequencies_; }
  const std::vector<double>& grid() const { return grid_; }
  Index grid_size() const { return static_cast<Index>(grid_.size()); }
  /// t in 1..N
  const ComplexMatrix& at(Index t) const;
  double clipped_mass() const { return clipped_mass_; }

 private:
  FrequencyGrid frequencies_;
  std::vector<double> grid_;
  std::vector<ComplexMatrix> factors_;
  double clipped_mass_;
};

PsdFactor psd_factorize(const SpectralKernelField& pooled_field);

/// J*_t = A_t (Z1 + i Z2) / sqrt(2) for t = 1..N, J*_{-t} = conj(J*_t),
/// J*_0 = 0; X is drawn before Y from the same generator.
std::pair<DftField, DftField> sample_pseudo_dfts(const PsdFactor& factor,
                                                 Rng& rng);

struct ReplicateStats {
  double u_stat = 0.0;
  double mu0_hat = 0.0;
  double theta0_hat = 0.0;
  double t_star = 0.0;  // studentized with bootstrap-side constants
  double t_plus = 0.0;  // studentized with the data-side constants
};

/// mu0 and theta0 from the observed pooled field; used by t_plus.
struct DataConstants {
  double mu0_hat = 0.0;
  double theta0_hat = 0.0;
};

/// One bootstrap draw. nullopt when the bootstrap pooled field is degenerate
/// (theta0* = 0); the caller redraws.
std::optional<ReplicateStats> bootstrap_replicate(const PsdFactor& factor,
                                                  const WeightKernel& kernel,
                                                  double bandwidth,
                                                  const DataConstants& data,
                                                  Rng& rng);

enum class BootstrapStatistic { t_star, t_plus };

std::optional<BootstrapStatistic> parse_statistic(std::string_view name);
std::string_view to_string(BootstrapStatistic statistic);

struct BootstrapOptions {
  Index replicates = 1000;
  std::uint64_t master_seed = 0;
  std::vector<double> alphas = {0.01, 0.05, 0.10};
  BootstrapStatistic statistic = BootstrapStatistic::t_star;
};

struct CriticalValue {
  double alpha = 0.0;
  double value = 0.0;
};

struct BootstrapOutcome {
  /// Both variants, indexed by replicate number.
  std::vector<double> t_star;
  std::vector<double> t_plus;
  BootstrapStatistic statistic = BootstrapStatistic::t_star;
  double observed = 0.0;
  double p_value = 1.0;
  std::vector<CriticalValue> critical_values;  // ascending alpha
  std::uint64_t master_seed = 0;
  Index replicates = 0;
  Index rejected_draws = 0;
  double clipped_mass = 0.0;

  const std::vector<double>& decision_replicates() const {
    return statistic == BootstrapStatistic::t_star ? t_star : t_plus;
  }
  /// Throws InputError if alpha was not requested.
  double critical_value(double alpha) const;
};

/// (1 + #{r >= observed}) / (B + 1)
double bootstrap_p_value(const std::vector<double>& replicates,
                         double observed);

/// Upper 1 - alpha point: the ceil((1 - alpha) B)-th smallest replicate.
double upper_critical_value(std::vector<double> replicates, double alpha);

/// Runs B replicates (in parallel; replicate r draws from stream
/// derive_seed(master_seed, "bootstrap", r)). Throws NumericError when more
/// than 1% of B draws had to be rejected as degenerate.
BootstrapOutcome run_bootstrap(const SpectralKernelField& fx,
                               const SpectralKernelField& fy,
                               const WeightKernel& kernel, double observed,
                               const BootstrapOptions& options);

}  // namespace specop
