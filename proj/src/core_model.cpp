#include "specop/core_model.hpp"

#include "specop/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specop {

namespace {

double column_mean_tolerance(const RealMatrix& values) {
  const double scale = values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
  return 1e-10 * std::max(1.0, scale);
}

template <class F>
double integrate(F&& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

FunctionalSample::FunctionalSample(RealMatrix values, std::vector<double> grid,
                                   bool centered)
    : values_(std::move(values)), grid_(std::move(grid)), centered_(centered) {
  if (values_.rows() < 4 || values_.cols() < 2) {
    std::ostringstream msg;
    msg << "functional sample needs T >= 4 and k >= 2, got T=" << values_.rows()
        << ", k=" << values_.cols();
    throw InputError(msg.str());
  }
  if (static_cast<Index>(grid_.size()) != values_.cols()) {
    throw InputError("grid has " + std::to_string(grid_.size()) +
                     " points but sample has " +
                     std::to_string(values_.cols()) + " columns");
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i]) || grid_[i] < 0.0 || grid_[i] > 1.0) {
      throw InputError("grid points must lie in [0,1]");
    }
    if (i > 0 && !(grid_[i] > grid_[i - 1])) {
      throw InputError("grid points must be strictly increasing");
    }
  }
  if (!values_.allFinite()) {
    throw InputError("sample contains NaN or Inf");
  }
  if (centered_) {
    const double tol = column_mean_tolerance(values_);
    const Eigen::RowVectorXd means = values_.colwise().mean();
    if (means.cwiseAbs().maxCoeff() > tol) {
      throw InputError("sample flagged as centered has nonzero column means");
    }
  }
}

FunctionalSample FunctionalSample::on_uniform_grid(RealMatrix values,
                                                   bool centered) {
  auto grid = uniform_grid(values.cols());
  return FunctionalSample(std::move(values), std::move(grid), centered);
}

bool FunctionalSample::has_equidistant_grid(double rel_tol) const {
  const double step = grid_[1] - grid_[0];
  for (std::size_t i = 2; i < grid_.size(); ++i) {
    if (std::abs((grid_[i] - grid_[i - 1]) - step) > rel_tol * step) {
      return false;
    }
  }
  return true;
}

std::vector<double> uniform_grid(Index k) {
  if (k < 2) throw InputError("uniform grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    grid[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(k - 1);
  }
  grid.back() = 1.0;
  return grid;
}

RealMatrix center_columns(const RealMatrix& values) {
  if (values.rows() == 0) return values;
  const Eigen::RowVectorXd means = values.colwise().mean();
  RealMatrix out = values.rowwise() - means;
  return out;
}

FunctionalSample center(const FunctionalSample& sample) {
  return FunctionalSample(center_columns(sample.values()), sample.grid(),
                          /*centered=*/true);
}

FrequencyGrid::FrequencyGrid(Index sample_length)
    : T_(sample_length), N_((sample_length - 1) / 2) {
  if (sample_length < 2) {
    throw InputError("frequency grid needs T >= 2");
  }
}

double FrequencyGrid::lambda(Index t) const {
  // Computed from |t| so that lambda(-t) == -lambda(t) bit for bit.
  const double magnitude =
      kTwoPi * static_cast<double>(t < 0 ? -t : t) / static_cast<double>(T_);
  return t < 0 ? -magnitude : magnitude;
}

Index FrequencyGrid::circular_offset(Index l, Index t) const {
  Index m = (l - t) % T_;
  if (m < 0) m += T_;
  // m in [0, T); map into (-T/2, T/2].
  if (2 * m > T_) m -= T_;
  return m;
}

double FrequencyGrid::circular_distance(Index l, Index t) const {
  const Index m = circular_offset(l, t);
  const double magnitude =
      kTwoPi * static_cast<double>(m < 0 ? -m : m) / static_cast<double>(T_);
  return m < 0 ? -magnitude : magnitude;
}

std::optional<KernelName> parse_kernel_name(std::string_view name) {
  if (name == "epanechnikov-pi") return KernelName::epanechnikov_pi;
  if (name == "uniform-pi") return KernelName::uniform_pi;
  return std::nullopt;
}

std::string_view to_string(KernelName name) {
  switch (name) {
    case KernelName::epanechnikov_pi:
      return "epanechnikov-pi";
    case KernelName::uniform_pi:
      return "uniform-pi";
  }
  return "unknown";
}

double WeightKernel::operator()(double x) const {
  const double ax = std::abs(x);
  if (ax > kPi) return 0.0;
  switch (name_) {
    case KernelName::epanechnikov_pi: {
      const double r = ax / kPi;
      return 1.5 * (1.0 - r * r);
    }
    case KernelName::uniform_pi:
      return 1.0;
  }
  return 0.0;
}

WeightKernel make_weight_kernel(KernelName name) {
  WeightKernel kernel(name);
  const auto w = [&kernel](double x) { return kernel(x); };

  kernel.mass_ = integrate(w, -kPi, 0.0) + integrate(w, 0.0, kPi);
  if (std::abs(kernel.mass_ - kTwoPi) > 1e-8) {
    throw NumericError("weight kernel " + std::string(to_string(name)) +
                       " does not integrate to 2*pi");
  }

  const auto w2 = [&kernel](double x) {
    const double v = kernel(x);
    return v * v;
  };
  kernel.kappa2_ = integrate(w2, -kPi, 0.0) + integrate(w2, 0.0, kPi);

  // The product W(u) W(u - x) is supported on [max(-pi, x-pi), min(pi, x+pi)]
  // and smooth there, so one panel per x suffices for the inner integral.
  const auto self_convolution = [&kernel](double x) {
    const double lo = std::max(-kPi, x - kPi);
    const double hi = std::min(kPi, x + kPi);
    if (hi <= lo) return 0.0;
    return integrate([&](double u) { return kernel(u) * kernel(u - x); }, lo,
                     hi);
  };
  const auto squared = [&](double x) {
    const double c = self_convolution(x);
    return c * c;
  };
  kernel.conv_sq_integral_ =
      integrate(squared, -2.0 * kPi, 0.0) + integrate(squared, 0.0, 2.0 * kPi);
  return kernel;
}

WeightKernel make_weight_kernel(std::string_view name) {
  const auto parsed = parse_kernel_name(name);
  if (!parsed) {
    throw InputError("unknown weight kernel '" + std::string(name) +
                     "' (expected epanechnikov-pi or uniform-pi)");
  }
  return make_weight_kernel(*parsed);
}

SpectralKernelField::SpectralKernelField(FrequencyGrid frequencies,
                                         std::vector<double> grid,
                                         double bandwidth,
                                         std::vector<ComplexMatrix> entries)
    : frequencies_(frequencies),
      grid_(std::move(grid)),
      bandwidth_(bandwidth),
      entries_(std::move(entries)) {
  if (static_cast<Index>(entries_.size()) != frequencies_.count()) {
    throw InputError("spectral field needs one matrix per Fourier frequency");
  }
  const Index k = grid_size();
  for (const auto& m : entries_) {
    if (m.rows() != k || m.cols() != k) {
      throw InputError("spectral field matrices must be k x k");
    }
  }
}

const ComplexMatrix& SpectralKernelField::at(Index t) const {
  if (!frequencies_.contains(t)) {
    throw InputError("frequency index " + std::to_string(t) +
                     " outside -N..N");
  }
  return entries_[static_cast<std::size_t>(frequencies_.slot(t))];
}

std::optional<std::string> SpectralKernelField::invariant_violation(
    double tol) const {
  const Index N = half_count();
  const Index k = grid_size();
  for (Index t = -N; t <= N; ++t) {
    const ComplexMatrix& F = at(t);
    const double bound = tol * (1.0 + F.cwiseAbs().maxCoeff());
    for (Index i = 0; i < k; ++i) {
      if (std::abs(F(i, i).imag()) > bound || F(i, i).real() < -bound) {
        return "diagonal not real nonnegative at t=" + std::to_string(t);
      }
      for (Index j = i + 1; j < k; ++j) {
        if (std::abs(F(j, i) - std::conj(F(i, j))) > bound) {
          return "not Hermitian at t=" + std::to_string(t);
        }
      }
    }
    if (t > 0 && (at(-t) - F.conjugate()).cwiseAbs().maxCoeff() > bound) {
      return "F_{-t} != conj(F_t) at t=" + std::to_string(t);
    }
  }
  return std::nullopt;
}

void require_matching(const SpectralKernelField& a,
                      const SpectralKernelField& b) {
  if (!(a.frequencies() == b.frequencies())) {
    throw InputError("spectral fields have different sample lengths");
  }
  if (a.grid() != b.grid()) {
    throw InputError("spectral fields live on different grids");
  }
  if (a.bandwidth() != b.bandwidth()) {
    throw InputError("spectral fields use different bandwidths");
  }
}

}  // namespace specop
