#include "frontier_sis/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace frontier_sis {

namespace {

constexpr std::size_t kCdfCells = 4096;
constexpr double kLaplaceTailMass = 1e-12;

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::TruncatedGaussian:
      return "truncated-gaussian";
    case KernelFamily::BumpMollifier:
      return "bump-mollifier";
    case KernelFamily::ExponentialLaplace:
      return "exponential-laplace";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "truncated-gaussian") return KernelFamily::TruncatedGaussian;
  if (name == "bump-mollifier") return KernelFamily::BumpMollifier;
  if (name == "exponential-laplace") return KernelFamily::ExponentialLaplace;
  throw KernelError("unknown kernel family '" + std::string(name) +
                    "' (expected truncated-gaussian, bump-mollifier or exponential-laplace)");
}

QuadratureGrid::QuadratureGrid(double left, double right, std::size_t n_nodes)
    : left_(left), right_(right), n_(n_nodes), dx_(0.0) {
  if (!(right > left) || !std::isfinite(left) || !std::isfinite(right)) {
    throw std::invalid_argument("quadrature grid needs finite left < right");
  }
  if (n_nodes == 0) throw std::invalid_argument("quadrature grid needs at least one node");
  dx_ = (right - left) / static_cast<double>(n_nodes);
}

std::vector<double> QuadratureGrid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

Kernel::Kernel(KernelFamily family, double width, double radius)
    : family_(family), width_(width), radius_(radius) {}

Kernel Kernel::make(KernelFamily family, double width, std::optional<double> truncation_radius) {
  if (!(width > 0.0) || !std::isfinite(width)) throw KernelError("kernel width must be positive");
  double radius = 0.0;
  switch (family) {
    case KernelFamily::TruncatedGaussian:
      radius = truncation_radius.value_or(6.0 * width);
      if (!(radius > 0.0)) throw KernelError("truncation radius must be positive");
      break;
    case KernelFamily::BumpMollifier:
      radius = width;
      if (truncation_radius && std::abs(*truncation_radius - width) > 1e-12 * width) {
        throw KernelError("bump-mollifier support radius equals its width");
      }
      break;
    case KernelFamily::ExponentialLaplace: {
      const double minimal = width * std::log(1.0 / kLaplaceTailMass);
      radius = truncation_radius.value_or(minimal);
      if (radius < minimal * (1.0 - 1e-12)) {
        throw KernelError("exponential-laplace truncation radius leaves tail mass above 1e-12");
      }
      break;
    }
  }
  if (!std::isfinite(radius)) throw KernelError("truncation radius must be finite");

  Kernel k(family, width, radius);
  if (family == KernelFamily::TruncatedGaussian) {
    k.cut_value_ = std::exp(-radius * radius / (2.0 * width * width));
  }
  k.build_cdf_table();
  return k;
}

Kernel Kernel::scaled_for_testing(double factor) const {
  Kernel k = *this;
  k.norm_ *= factor;
  for (double& v : k.cdf_table_) v *= factor;
  return k;
}

double Kernel::shape(double x) const {
  if (x >= radius_) return 0.0;
  switch (family_) {
    case KernelFamily::TruncatedGaussian:
      return std::exp(-x * x / (2.0 * width_ * width_)) - cut_value_;
    case KernelFamily::BumpMollifier: {
      const double r = x / width_;
      return std::exp(-1.0 / (1.0 - r * r));
    }
    case KernelFamily::ExponentialLaplace:
      return std::exp(-x / width_);
  }
  return 0.0;
}

double Kernel::operator()(double x) const { return norm_ * shape(std::abs(x)); }

double Kernel::cell_integral(double a, double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
    sum += kGaussWeights[q] * (*this)(mid + half * kGaussNodes[q]);
  }
  return sum * half;
}

void Kernel::build_cdf_table() {
  // Integrate the unnormalized shape over [-R, 0]; symmetry supplies the rest.
  norm_ = 1.0;
  table_h_ = radius_ / static_cast<double>(kCdfCells);
  cdf_table_.assign(kCdfCells + 1, 0.0);
  for (std::size_t k = 0; k < kCdfCells; ++k) {
    const double a = -radius_ + static_cast<double>(k) * table_h_;
    cdf_table_[k + 1] = cdf_table_[k] + cell_integral(a, a + table_h_);
  }
  const double half_mass = cdf_table_.back();
  norm_ = 0.5 / half_mass;
  for (double& v : cdf_table_) v *= norm_;
}

double Kernel::cdf(double x) const {
  if (std::isnan(x)) throw KernelError("kernel cdf at NaN");
  if (x <= -radius_) return 0.0;
  if (x >= radius_) return 2.0 * cdf_table_.back();
  if (x > 0.0) return 2.0 * cdf_table_.back() - cdf(-x);
  auto k = static_cast<std::size_t>((x + radius_) / table_h_);
  k = std::min(k, kCdfCells - 1);
  const double a = -radius_ + static_cast<double>(k) * table_h_;
  return cdf_table_[k] + cell_integral(a, x);
}

double Kernel::mass(double a, double b) const {
  if (std::isnan(a) || std::isnan(b) || a > b) {
    throw KernelError("kernel mass needs a <= b");
  }
  return std::max(0.0, cdf(b) - cdf(a));
}

ToeplitzKernel::ToeplitzKernel(const Kernel& kernel, double dx, std::size_t n) : n_(n), dx_(dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (n == 0) throw std::invalid_argument("empty grid");
  weights_.push_back(kernel(0.0) * dx);
  for (std::size_t k = 1; k < n; ++k) {
    const double w = kernel(static_cast<double>(k) * dx) * dx;
    if (w <= 0.0) break;
    weights_.push_back(w);
  }
}

void ToeplitzKernel::apply(std::span<const double> in, std::span<double> out, std::size_t lo,
                           std::size_t hi) const {
  const std::size_t band = bandwidth();
  hi = std::min(hi, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = std::max(lo, i > band ? i - band : 0);
    const std::size_t j1 = std::min(hi, i + band + 1);
    double sum = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
      sum += weights_[i > j ? i - j : j - i] * in[j];
    }
    out[i] = sum;
  }
}

std::vector<double> ToeplitzKernel::row_sums() const {
  std::vector<double> ones(n_, 1.0), sums(n_);
  apply(ones, sums);
  return sums;
}

DenseMatrix ToeplitzKernel::dense() const {
  DenseMatrix m{n_, std::vector<double>(n_ * n_, 0.0)};
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = weight(i > j ? i - j : j - i);
  }
  return m;
}

DenseMatrix kernel_matrix(const Kernel& kernel, const QuadratureGrid& grid) {
  if (grid.dx() > 0.5 * kernel.width()) {
    throw KernelError("grid spacing exceeds half the kernel width (kernel under-resolved)");
  }
  return ToeplitzKernel(kernel, grid.dx(), grid.size()).dense();
}

}  // namespace frontier_sis
