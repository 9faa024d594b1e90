#pragma once

#include <string>
#include <vector>

#include "frontier_sis/kernel.hpp"

namespace frontier_sis {

enum class VerifyLevel { Fast, Full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Fast;
  /// Test hook: multiplies every kernel's mass. Anything but 1 must make the
  /// normalization property fail.
  double kernel_mass_factor = 1.0;
};

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
  bool lower_limit = false;  // pass means measured >= limit
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  std::vector<std::string> tables;  // extra text blocks (full level)

  bool all_pass() const;
  std::string text() const;
};

VerifyReport run_verify(const VerifyOptions& options = {});

/// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
double jacobi_max_eigenvalue(const DenseMatrix& m);

}  // namespace frontier_sis
