#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frontier_sis/coeffs.hpp"
#include "frontier_sis/kernel.hpp"

namespace frontier_sis {

/// Discretization of  phi -> d * int_{L1}^{L2} J(x - y) phi(y) dy - d phi(x) + a(x) phi(x)
/// on a uniform cell-centred grid over (L1, L2). `a` holds node values.
struct EigenProblem {
  Kernel kernel;
  double d = 1.0;
  double L1 = -1.0;
  double L2 = 1.0;
  std::vector<double> a;

  QuadratureGrid grid() const { return QuadratureGrid(L1, L2, a.size()); }

  static EigenProblem from_function(const Kernel& kernel, double d, double L1, double L2,
                                    std::size_t n_nodes, const std::function<double(double)>& a_of_x);
  static EigenProblem from_model(const Kernel& kernel, const CoefficientModel& model, double d,
                                 double L1, double L2, std::size_t n_nodes);
};

class EigenProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when the iteration budget runs out before the residual tolerance is met.
class EigenSolverError : public std::runtime_error {
 public:
  EigenSolverError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

struct EigenOptions {
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  /// Plain shifted power steps before switching to shifted inverse iteration.
  std::size_t power_steps = 400;
};

struct EigenResult {
  double lambda_p = 0.0;
  std::vector<double> phi;  // positive, max-normalized
  double residual = 0.0;    // sup norm of A phi - lambda phi
  std::size_t iterations = 0;
  /// Collatz-Wielandt enclosure of the dominant eigenvalue from the final phi.
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  /// a is constant on the grid (its maximum is attained everywhere).
  bool constant_profile = false;
  /// d == 0: the operator is diag(a) and phi is the indicator of argmax a.
  bool degenerate = false;
};

/// A_h = d W - d Id + diag(a), dense.
DenseMatrix assemble(const EigenProblem& problem);

/// Dominant eigenpair of A_h. Starts from the all-ones vector with shifted power
/// steps (shift d + max|a| + 1), then accelerates with shifted inverse
/// iteration whose shift sits above the Collatz-Wielandt upper bound, so
/// every iterate stays positive.
EigenResult principal_eigenvalue(const EigenProblem& problem, const EigenOptions& options = {});

enum class SweepAxis { Diffusion, IntervalHalfwidth, MediaScale, BedScale };
std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct EigenSweepBase {
  Kernel kernel;
  CoefficientModel model;
  double d = 1.0;
  double L1 = -1.0;
  double L2 = 1.0;
  std::size_t n_nodes = 100;
};

struct EigenSweepRow {
  double value = 0.0;
  EigenResult result;
};

struct EigenSweepTable {
  SweepAxis axis = SweepAxis::Diffusion;
  std::vector<EigenSweepRow> rows;
  /// Largest step against the expected monotone direction (<= 0 when none).
  double max_violation = 0.0;
  bool monotone_ok = true;  // max_violation <= 2 tol
  bool strict = true;       // every step strictly in the expected direction
};

class EigenSweepError : public std::runtime_error {
 public:
  EigenSweepError(const std::string& what, double value) : std::runtime_error(what), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

/// lambda_p along one axis. Interval sweeps use (c - v, c + v) around the base
/// centre with the base grid spacing, so smaller grids nest inside larger ones.
/// Expected directions: d strictly decreasing, halfwidth nondecreasing,
/// media and bed scale nonincreasing.
EigenSweepTable eigen_sweep(const EigenSweepBase& base, SweepAxis axis, std::span<const double> values,
                            const EigenOptions& options = {}, std::size_t jobs = 1);

class CriticalValueError : public std::runtime_error {
 public:
  enum class Kind { AlwaysNegative, AlwaysPositive, Precondition };
  CriticalValueError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct CriticalOptions {
  double L_min = 1e-3;
  double L_max = 100.0;
  double d_max = 1e6;
  /// Target grid spacing; clipped to a quarter kernel width.
  double dx = 0.05;
  std::size_t min_nodes = 8;
  EigenOptions eigen;
};

/// lambda_p on the symmetric interval (-L, L) with the grid rule used by the
/// root finders.
double lambda_on_halfwidth(const CoefficientModel& model, const Kernel& kernel, double d, double L,
                           const CriticalOptions& options = {});

struct CriticalLengthResult {
  double L_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double lambda_lo = 0.0;  // < 0
  double lambda_hi = 0.0;  // > 0
  std::size_t evaluations = 0;
};

/// Halfwidth L* with lambda_p(-L*, L*) = 0, by bisection until the bracket is
/// no wider than tol.
CriticalLengthResult critical_length(const CoefficientModel& model, const Kernel& kernel, double d,
                                     double tol, const CriticalOptions& options = {});

struct CriticalDiffusionResult {
  double d_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double tail_mass = 0.0;  // mass of J on (-inf, -2 h0)
  double max_a = 0.0;
  bool vanishing_for_all_d = false;  // max a <= 0 on [-h0, h0]
  std::size_t evaluations = 0;
};

/// Diffusion rate d* with lambda_p((-h0, h0), d*) = 0. Requires J to put mass
/// beyond 2 h0; returns d* = 0 when max a <= 0 on the interval.
CriticalDiffusionResult critical_diffusion(const CoefficientModel& model, const Kernel& kernel,
                                           double h0, double tol, const CriticalOptions& options = {});

}  // namespace frontier_sis
