#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frontier_sis {

class KernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class KernelFamily { TruncatedGaussian, BumpMollifier, ExponentialLaplace };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Uniform cell-centred grid on (left, right): node i sits at
/// left + (i + 1/2) * dx with dx = (right - left) / n.
class QuadratureGrid {
 public:
  QuadratureGrid(double left, double right, std::size_t n_nodes);

  double left() const { return left_; }
  double right() const { return right_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  /// Right-half nodes are measured from the right end, so grids on (-L, L)
  /// are mirror-symmetric in floating point.
  double node(std::size_t i) const {
    return 2 * i < n_ ? left_ + (static_cast<double>(i) + 0.5) * dx_
                      : right_ - (static_cast<double>(n_ - 1 - i) + 0.5) * dx_;
  }
  std::vector<double> nodes() const;

 private:
  double left_;
  double right_;
  std::size_t n_;
  double dx_;
};

/// Dense row-major matrix. Only materialized on request; the solvers work
/// with the Toeplitz table below.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Symmetric dispersal kernel with unit mass, J(0) > 0, supported on [-R, R].
///
/// The gaussian family is shifted down by its value at R so that it stays
/// continuous after truncation. The laplace family is truncated where the
/// neglected tail mass drops below 1e-12 and renormalized.
class Kernel {
 public:
  /// Radius defaults: 6 * width (gaussian), width (bump), tail-mass cut (laplace).
  static Kernel make(KernelFamily family, double width, std::optional<double> truncation_radius = {});

  /// Test hook: a kernel whose normalization constant is scaled by `factor`,
  /// so its mass is `factor` instead of 1.
  Kernel scaled_for_testing(double factor) const;

  double operator()(double x) const;

  /// Integral of J over [a, b]; infinite limits are allowed. Throws on a > b.
  double mass(double a, double b) const;

  /// Integral of J over (-inf, x].
  double cdf(double x) const;

  KernelFamily family() const { return family_; }
  double width() const { return width_; }
  double radius() const { return radius_; }
  double normalization_constant() const { return norm_; }
  double sup_norm() const { return (*this)(0.0); }

 private:
  Kernel(KernelFamily family, double width, double radius);
  double shape(double x) const;  // unnormalized, x >= 0
  void build_cdf_table();
  double cell_integral(double a, double b) const;

  KernelFamily family_;
  double width_;
  double radius_;
  double norm_ = 1.0;
  double cut_value_ = 0.0;  // gaussian shift
  double table_h_ = 0.0;
  std::vector<double> cdf_table_;  // cumulative mass on [-R, 0]
};

/// Translation-invariant kernel weights on a uniform grid: weight(k) = J(k dx) dx.
/// Application is banded, so memory stays O(n).
class ToeplitzKernel {
 public:
  ToeplitzKernel(const Kernel& kernel, double dx, std::size_t n);

  double weight(std::size_t offset) const { return offset < weights_.size() ? weights_[offset] : 0.0; }
  std::size_t bandwidth() const { return weights_.size() - 1; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }

  /// out[i] = sum_j weight(|i-j|) * in[j], restricted to j in [lo, hi).
  void apply(std::span<const double> in, std::span<double> out, std::size_t lo, std::size_t hi) const;
  void apply(std::span<const double> in, std::span<double> out) const { apply(in, out, 0, n_); }

  std::vector<double> row_sums() const;
  DenseMatrix dense() const;

 private:
  std::vector<double> weights_;
  std::size_t n_;
  double dx_;
};

/// W[i][j] = J(x_i - x_j) dx. Rejects grids with dx > width / 2.
DenseMatrix kernel_matrix(const Kernel& kernel, const QuadratureGrid& grid);

}  // namespace frontier_sis
