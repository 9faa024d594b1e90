#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace frontier_sis {

/// Cholesky factor of a symmetric positive definite band matrix, stored by
/// rows: entry (i, i - k) at lower_[i * (bandwidth + 1) + k].
class BandCholesky {
 public:
  /// `entry(i, j)` must return M(i, j) for j <= i <= j + bandwidth.
  /// Returns false when M is not numerically positive definite.
  template <class Entry>
  bool factor(std::size_t n, std::size_t bandwidth, Entry&& entry);

  void solve(std::span<double> rhs) const;

  std::size_t size() const { return n_; }

 private:
  double& at(std::size_t i, std::size_t j) { return lower_[i * (band_ + 1) + (i - j)]; }
  double at(std::size_t i, std::size_t j) const { return lower_[i * (band_ + 1) + (i - j)]; }
  bool factor_in_place();

  std::size_t n_ = 0;
  std::size_t band_ = 0;
  std::vector<double> lower_;
};

template <class Entry>
bool BandCholesky::factor(std::size_t n, std::size_t bandwidth, Entry&& entry) {
  n_ = n;
  band_ = n == 0 ? 0 : (bandwidth < n ? bandwidth : n - 1);
  lower_.assign(n_ * (band_ + 1), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > band_ ? i - band_ : 0;
    for (std::size_t j = j0; j <= i; ++j) at(i, j) = entry(i, j);
  }
  return factor_in_place();
}

}  // namespace frontier_sis
