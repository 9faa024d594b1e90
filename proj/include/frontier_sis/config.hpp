#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_sis/dynamics.hpp"
#include "frontier_sis/eigen.hpp"
#include "frontier_sis/sweep.hpp"

namespace frontier_sis {

/// Every problem found while reading a config document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct EigenRunConfig {
  double L1 = -1.0;
  double L2 = 1.0;
  std::size_t n_nodes = 200;
};

struct ThresholdConfig {
  double k_lo = 1e-3;
  double k_hi = 10.0;
  std::size_t refinements = 8;
  double tol = 1e-6;
  CriticalOptions critical;
};

struct OutputConfig {
  std::string dir = "out";
  std::string file;  // empty: stdout
};

struct RunConfig {
  SimConfig sim;
  EigenRunConfig eigen;
  ThresholdConfig threshold;
  std::vector<AxisValues> sweep_axes;
  std::size_t jobs = 1;
  OutputConfig output;
  /// FNV-1a of the canonical (key-sorted, compact) document.
  std::uint64_t hash = 0;
};

/// JSON document -> validated RunConfig. Throws ConfigError listing all problems.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace frontier_sis
