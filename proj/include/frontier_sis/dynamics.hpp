#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_sis/coeffs.hpp"
#include "frontier_sis/eigen.hpp"
#include "frontier_sis/kernel.hpp"
#include "frontier_sis/spatial_function.hpp"

namespace frontier_sis {

struct ClassifyThresholds {
  double eps_vanish = 1e-6;
  double eps_speed = 1e-8;
  /// Interval length that counts as spread. Unset: 4 L* when L* is known,
  /// otherwise 10 * (2 h0).
  std::optional<double> L_spread;
  double delta_persist = 1e-4;
  double trailing_window = 20.0;
};

struct SimConfig {
  Kernel kernel = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
  CoefficientModel model{CoefficientParams{}};
  double d = 1.0;
  double k = 1.0;
  double h0 = 1.0;
  SpatialFunction S0 = SpatialFunction::constant(1.0);
  SpatialFunction I0 = SpatialFunction(SpatialFunction::PiecewiseLinear{{{-1.0, 0.0}, {0.0, 0.1}, {1.0, 0.0}}});
  double X = 20.0;
  std::size_t n_nodes = 1000;
  double dt = 0.0;  // 0 selects dt_stable
  double t_end = 200.0;
  double sample_interval = 0.5;
  std::vector<double> snapshot_times;
  std::vector<double> probes = {0.0};
  bool early_exit = true;
  ClassifyThresholds thresholds;
  std::optional<double> L_star;
  EigenOptions eigen{1e-9, 100000, 400};
};

class SimulationError : public std::runtime_error {
 public:
  enum class Kind { Config, DtTooLarge, WindowExhausted, InvariantViolation };
  SimulationError(Kind kind, const std::string& what, double t = 0.0)
      : std::runtime_error(what), kind_(kind), t_(t) {}
  Kind kind() const { return kind_; }
  double time() const { return t_; }

 private:
  Kind kind_;
  double t_;
};

struct SimState {
  double t = 0.0;
  std::vector<double> S;  // every window node
  std::vector<double> I;  // zero at nodes outside (g, h)
  double g = 0.0;
  double h = 0.0;
  /// S beyond the left and right window edges; far from the infection S
  /// obeys S' = sigma - mu1 S, stepped with the same Euler rule.
  double S_far_left = 0.0;
  double S_far_right = 0.0;
  /// Accumulated |S - S_far| exchange through the window edges.
  double leakage = 0.0;
};

struct FrontRates {
  double g_dot = 0.0;  // <= 0
  double h_dot = 0.0;  // >= 0
};

struct Snapshot {
  double t = 0.0;
  double g = 0.0;
  double h = 0.0;
  std::vector<double> x;
  std::vector<double> S;
  std::vector<double> I;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> max_I;
  std::vector<double> total_I;
  std::vector<double> probe_x;
  std::vector<std::vector<double>> S_probe;  // [sample][probe]
  std::vector<Snapshot> snapshots;

  std::size_t size() const { return t.size(); }
};

enum class OutcomeClass { Spreading, Vanishing, Undecided };
std::string_view to_string(OutcomeClass c);

struct Outcome {
  OutcomeClass cls = OutcomeClass::Undecided;
  double final_interval_length = 0.0;
  double final_g = 0.0;
  double final_h = 0.0;
  double final_max_I = 0.0;
  double lambda_p_at_final_interval = 0.0;  // NaN until computed
  double horizon = 0.0;
  double front_speed = 0.0;       // d(h - g)/dt averaged over the trailing window
  double trailing_min_max_I = 0.0;
  double L_spread = 0.0;
};

struct SpectralAudit {
  bool applicable = false;  // outcome was Vanishing
  double lambda_p = 0.0;
  double tol = 0.0;
  bool violation = false;   // lambda_p > 10 tol
};

struct SimResult {
  Trajectory trajectory;
  Outcome outcome;
  SpectralAudit audit;
  SimState final_state;
  double dt = 0.0;
  double bound_A = 0.0;
  std::size_t steps = 0;
};

/// A = max(sigma / mu1, sup S0 + sup I0)
double a_priori_bound(const SimConfig& config);
/// 0.5 / (d + max(mu1, mu2 + sup gamma1) + sup beta * A)
double stable_dt(const SimConfig& config);

/// Precomputed grid, kernel band and coefficient tables for one configuration.
class Simulator {
 public:
  explicit Simulator(SimConfig config);

  SimState initial_state() const;
  FrontRates boundary_flux(const SimState& state) const;
  /// One forward-Euler step. Throws SimulationError on invariant or window violations.
  SimState step(const SimState& state, double dt) const;

  const SimConfig& config() const { return cfg_; }
  const QuadratureGrid& grid() const { return grid_; }
  double bound_A() const { return bound_A_; }
  double dt_stable() const { return dt_stable_; }
  /// Indices [lo, hi) of nodes strictly inside (g, h).
  std::pair<std::size_t, std::size_t> active_range(double g, double h) const;

 private:
  void check_invariants(const SimState& s, const SimState& prev) const;

  SimConfig cfg_;
  QuadratureGrid grid_;
  std::vector<double> x_;
  std::vector<double> weights_;    // J(k dx) dx
  std::vector<double> row_sums_;
  std::vector<double> exterior_;   // max(0, 1 - row sum)
  double bound_A_ = 0.0;
  double dt_stable_ = 0.0;
};

FrontRates boundary_flux(const SimState& state, const SimConfig& config);
SimState step(const SimState& state, const SimConfig& config, double dt);
SimResult simulate(const SimConfig& config);
Outcome classify(const Trajectory& trajectory, const ClassifyThresholds& thresholds, double h0,
                 std::optional<double> L_star = {});
SpectralAudit verify_vanishing_spectral(const Outcome& outcome, const SimConfig& config);

}  // namespace frontier_sis
