#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_sis/dynamics.hpp"

namespace frontier_sis {

enum class PlanAxis { D, K, H0, MediaScale, BedScale };
std::string_view to_string(PlanAxis axis);
PlanAxis parse_plan_axis(std::string_view name);

struct AxisValues {
  PlanAxis axis = PlanAxis::D;
  std::vector<double> values;
};

struct SweepPlan {
  SimConfig base;
  std::vector<AxisValues> axes;  // one or two
  std::size_t jobs = 1;
  /// Identifies the plan in output metadata.
  std::uint64_t config_hash = 0;
};

struct PhaseRow {
  std::vector<double> axis_values;
  OutcomeClass cls = OutcomeClass::Undecided;
  double final_len = 0.0;
  double final_max_I = 0.0;
  double lambda_p_final = 0.0;
  double lambda_p_initial = 0.0;  // on (-h0, h0)
  double runtime_s = 0.0;         // wall clock, excluded from comparisons
  std::string status = "ok";

  bool same_result(const PhaseRow& other) const;
};

struct PhaseTable {
  std::vector<PlanAxis> axes;
  std::vector<PhaseRow> rows;  // lexicographic in axis indices
  std::uint64_t config_hash = 0;
  std::size_t n_nodes = 0;
  double dx = 0.0;
  double dt = 0.0;  // 0 when rows used different dt
  std::vector<std::string> warnings;

  bool same_results(const PhaseTable& other) const;
};

/// Base configuration with one axis value applied. The h0 axis dilates I0 so
/// that its support follows (-h0, h0).
SimConfig apply_axis(const SimConfig& base, PlanAxis axis, double value);

/// Runs every grid point (concurrently up to plan.jobs). Per-row failures are
/// recorded in the row status; the sweep itself does not throw for them.
PhaseTable run_sweep(const SweepPlan& plan);

std::string phase_table_csv(const PhaseTable& table);

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KProbe {
  double k = 0.0;
  OutcomeClass cls = OutcomeClass::Undecided;
};

struct KBracket {
  double k_lower_bound = 0.0;  // classified Vanishing
  double k_upper_bound = 0.0;  // classified Spreading
  std::vector<KProbe> probes;
};

using KClassifier = std::function<OutcomeClass(double k)>;

/// Bisection on k between a Vanishing k_lo and a Spreading k_hi. Undecided
/// probes are kept inside the bracket; later probes split the larger of the
/// decided gaps on either side of the undecided band.
KBracket bracket_k_threshold(const KClassifier& classify_k, double k_lo, double k_hi, std::size_t refinements);
KBracket bracket_k_threshold(const SimConfig& base, double k_lo, double k_hi, std::size_t refinements);

}  // namespace frontier_sis
