#include "frontier_sis/banded.hpp"

#include <algorithm>
#include <cmath>

namespace frontier_sis {

bool BandCholesky::factor_in_place() {
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t p0 = j > band_ ? j - band_ : 0;
    double diag = at(j, j);
    for (std::size_t p = p0; p < j; ++p) diag -= at(j, p) * at(j, p);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    at(j, j) = ljj;
    const std::size_t i1 = std::min(n_ - 1, j + band_);
    for (std::size_t i = j + 1; i <= i1; ++i) {
      const std::size_t q0 = i > band_ ? i - band_ : 0;
      double s = at(i, j);
      for (std::size_t p = q0; p < j; ++p) s -= at(i, p) * at(j, p);
      at(i, j) = s / ljj;
    }
  }
  return true;
}

void BandCholesky::solve(std::span<double> rhs) const {
  // L y = rhs
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t p0 = i > band_ ? i - band_ : 0;
    double s = rhs[i];
    for (std::size_t p = p0; p < i; ++p) s -= at(i, p) * rhs[p];
    rhs[i] = s / at(i, i);
  }
  // L^T x = y
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t i1 = std::min(n_ - 1, ii + band_);
    double s = rhs[ii];
    for (std::size_t p = ii + 1; p <= i1; ++p) s -= at(p, ii) * rhs[p];
    rhs[ii] = s / at(ii, ii);
  }
}

}  // namespace frontier_sis
