#include "frontier_sis/eigen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "frontier_sis/banded.hpp"

namespace frontier_sis {

EigenProblem EigenProblem::from_function(const Kernel& kernel, double d, double L1, double L2,
                                         std::size_t n_nodes,
                                         const std::function<double(double)>& a_of_x) {
  QuadratureGrid grid(L1, L2, n_nodes);
  std::vector<double> a(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) a[i] = a_of_x(grid.node(i));
  return EigenProblem{kernel, d, L1, L2, std::move(a)};
}

EigenProblem EigenProblem::from_model(const Kernel& kernel, const CoefficientModel& model, double d,
                                      double L1, double L2, std::size_t n_nodes) {
  QuadratureGrid grid(L1, L2, n_nodes);
  const auto nodes = grid.nodes();
  return EigenProblem{kernel, d, L1, L2, model.a_profile(nodes)};
}

namespace {

void validate(const EigenProblem& p) {
  if (!(p.L1 < p.L2)) throw EigenProblemError("eigen problem needs L1 < L2");
  if (!(p.d >= 0.0) || !std::isfinite(p.d)) throw EigenProblemError("diffusion rate must be >= 0");
  if (p.a.empty()) throw EigenProblemError("eigen problem needs at least one node");
  for (double v : p.a) {
    if (!std::isfinite(v)) throw EigenProblemError("a must be finite at every node");
  }
}

ToeplitzKernel make_weights(const EigenProblem& p) {
  const QuadratureGrid grid = p.grid();
  ToeplitzKernel weights(p.kernel, grid.dx(), grid.size());
  if (grid.size() >= 2 && p.d > 0.0 && weights.weight(1) <= 0.0) {
    throw EigenProblemError("grid under-resolves the kernel: J(dx) = 0, operator is reducible");
  }
  return weights;
}

class Operator {
 public:
  Operator(const EigenProblem& p, const ToeplitzKernel& w) : p_(p), w_(w) {}

  void apply(std::span<const double> x, std::span<double> y) const {
    w_.apply(x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = p_.d * y[i] + (p_.a[i] - p_.d) * x[i];
  }

  double entry(std::size_t i, std::size_t j) const {
    const double off = p_.d * w_.weight(i > j ? i - j : j - i);
    return i == j ? off + p_.a[i] - p_.d : off;
  }

  std::size_t size() const { return p_.a.size(); }
  std::size_t bandwidth() const { return p_.d > 0.0 ? w_.bandwidth() : 0; }

 private:
  const EigenProblem& p_;
  const ToeplitzKernel& w_;
};

struct Readout {
  double rayleigh = 0.0;
  double residual = 0.0;
  double cw_lo = 0.0;
  double cw_hi = 0.0;
};

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Readout read_out(std::span<const double> x, std::span<const double> ax) {
  Readout r;
  double xx = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    xy += x[i] * ax[i];
  }
  r.rayleigh = xy / xx;
  double res = 0.0;
  r.cw_lo = std::numeric_limits<double>::infinity();
  r.cw_hi = -std::numeric_limits<double>::infinity();
  const double scale = sup_norm(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    res = std::max(res, std::abs(ax[i] - r.rayleigh * x[i]));
    if (x[i] > 1e-280 * scale) {
      const double q = ax[i] / x[i];
      r.cw_lo = std::min(r.cw_lo, q);
      r.cw_hi = std::max(r.cw_hi, q);
    }
  }
  r.residual = res / scale;
  return r;
}

void normalize_sup(std::span<double> v) {
  const double m = sup_norm(v);
  for (double& x : v) x /= m;
}

}  // namespace

DenseMatrix assemble(const EigenProblem& problem) {
  validate(problem);
  const ToeplitzKernel weights = make_weights(problem);
  const Operator op(problem, weights);
  const std::size_t n = problem.a.size();
  DenseMatrix m{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = op.entry(i, j);
  }
  return m;
}

EigenResult principal_eigenvalue(const EigenProblem& problem, const EigenOptions& options) {
  validate(problem);
  if (!(options.tol > 0.0)) throw EigenProblemError("eigen tolerance must be positive");
  const std::size_t n = problem.a.size();
  const double a_max = *std::max_element(problem.a.begin(), problem.a.end());
  const double a_min = *std::min_element(problem.a.begin(), problem.a.end());

  EigenResult result;
  result.constant_profile = (a_max == a_min);

  if (problem.d == 0.0) {
    result.degenerate = true;
    result.lambda_p = a_max;
    result.phi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) result.phi[i] = problem.a[i] == a_max ? 1.0 : 0.0;
    result.lower_bound = result.upper_bound = a_max;
    return result;
  }

  const ToeplitzKernel weights = make_weights(problem);
  const Operator op(problem, weights);
  double a_abs = 0.0;
  for (double v : problem.a) a_abs = std::max(a_abs, std::abs(v));
  const double shift = problem.d + a_abs + 1.0;

  std::vector<double> x(n, 1.0), ax(n);
  Readout r;
  std::size_t it = 0;

  auto finish = [&]() {
    normalize_sup(x);
    op.apply(x, ax);
    r = read_out(x, ax);
    result.lambda_p = r.rayleigh;
    result.residual = r.residual;
    result.iterations = it;
    result.lower_bound = r.cw_lo;
    result.upper_bound = r.cw_hi;
    result.phi = x;
    return result;
  };

  // Stage 1: power iteration on A + shift * Id.
  const std::size_t power_budget = std::min(options.max_iters, options.power_steps);
  for (;; ++it) {
    op.apply(x, ax);
    r = read_out(x, ax);
    if (r.residual <= options.tol) return finish();
    if (it >= power_budget) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = ax[i] + shift * x[i];
    normalize_sup(x);
  }

  // Stage 2: inverse iteration with (sigma Id - A), sigma above the
  // Collatz-Wielandt upper bound. sigma Id - A is then a nonsingular
  // M-matrix, so its inverse is nonnegative and keeps x positive.
  BandCholesky chol;
  const double scale = 1.0 + std::abs(r.cw_hi) + shift;
  double margin = 0.0;
  while (it < options.max_iters) {
    const double gap = std::max(0.0, r.cw_hi - r.rayleigh);
    margin = std::max(0.05 * gap, 64.0 * std::numeric_limits<double>::epsilon() * scale);
    double sigma = r.cw_hi + margin;
    bool ok = false;
    for (int attempt = 0; attempt < 60 && !ok; ++attempt) {
      ok = chol.factor(n, op.bandwidth(),
                       [&](std::size_t i, std::size_t j) { return (i == j ? sigma : 0.0) - op.entry(i, j); });
      if (!ok) {
        margin *= 4.0;
        sigma = r.cw_hi + margin;
      }
    }
    if (!ok) break;
    for (int inner = 0; inner < 4 && it < options.max_iters; ++inner) {
      ++it;
      chol.solve(x);
      normalize_sup(x);
      op.apply(x, ax);
      r = read_out(x, ax);
      if (r.residual <= options.tol) return finish();
    }
  }

  throw EigenSolverError("principal eigenvalue did not converge: residual " + std::to_string(r.residual) +
                             " after " + std::to_string(it) + " iterations",
                         r.residual, it);
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Diffusion:
      return "d";
    case SweepAxis::IntervalHalfwidth:
      return "interval-halfwidth";
    case SweepAxis::MediaScale:
      return "media-scale";
    case SweepAxis::BedScale:
      return "bed-scale";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "d") return SweepAxis::Diffusion;
  if (name == "interval-halfwidth") return SweepAxis::IntervalHalfwidth;
  if (name == "media-scale") return SweepAxis::MediaScale;
  if (name == "bed-scale") return SweepAxis::BedScale;
  throw std::invalid_argument("unknown eigen sweep axis '" + std::string(name) +
                              "' (expected d, interval-halfwidth, media-scale or bed-scale)");
}

EigenSweepTable eigen_sweep(const EigenSweepBase& base, SweepAxis axis, std::span<const double> values,
                            const EigenOptions& options, std::size_t jobs) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw std::invalid_argument("sweep values must be strictly ascending");
  }
  const double dx = (base.L2 - base.L1) / static_cast<double>(base.n_nodes);
  const double centre = 0.5 * (base.L1 + base.L2);

  auto build = [&](double v) -> EigenProblem {
    switch (axis) {
      case SweepAxis::Diffusion:
        return EigenProblem::from_model(base.kernel, base.model, v, base.L1, base.L2, base.n_nodes);
      case SweepAxis::IntervalHalfwidth: {
        if (!(v > 0.0)) throw std::invalid_argument("interval halfwidth must be positive");
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(2.0 * v / dx)));
        return EigenProblem::from_model(base.kernel, base.model, base.d, centre - v, centre + v, n);
      }
      case SweepAxis::MediaScale:
        return EigenProblem::from_model(base.kernel, base.model.with_media_scale(v), base.d, base.L1,
                                        base.L2, base.n_nodes);
      case SweepAxis::BedScale:
        return EigenProblem::from_model(base.kernel, base.model.with_bed_scale(v), base.d, base.L1,
                                        base.L2, base.n_nodes);
    }
    throw std::logic_error("unhandled sweep axis");
  };

  EigenSweepTable table;
  table.axis = axis;
  table.rows.resize(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        table.rows[i] = EigenSweepRow{values[i], principal_eigenvalue(build(values[i]), options)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, values.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw EigenSweepError(std::string("eigen sweep failed at ") + std::string(to_string(axis)) + " = " +
                                std::to_string(values[i]) + ": " + e.what(),
                            values[i]);
    }
  }

  // +1: lambda should grow with the axis value, -1: shrink.
  const double direction = axis == SweepAxis::IntervalHalfwidth ? 1.0 : -1.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double step = table.rows[i].result.lambda_p - table.rows[i - 1].result.lambda_p;
    const double against = -direction * step;
    worst = std::max(worst, against);
    if (against >= 0.0) table.strict = false;
  }
  table.max_violation = table.rows.size() > 1 ? worst : 0.0;
  table.monotone_ok = table.max_violation <= 2.0 * options.tol;
  return table;
}

double lambda_on_halfwidth(const CoefficientModel& model, const Kernel& kernel, double d, double L,
                           const CriticalOptions& options) {
  const double dx = std::min(options.dx, 0.25 * kernel.width());
  const auto n = std::max<std::size_t>(options.min_nodes, static_cast<std::size_t>(std::ceil(2.0 * L / dx)));
  return principal_eigenvalue(EigenProblem::from_model(kernel, model, d, -L, L, n), options.eigen).lambda_p;
}

CriticalLengthResult critical_length(const CoefficientModel& model, const Kernel& kernel, double d,
                                     double tol, const CriticalOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("critical_length: tolerance must be positive");
  if (!(options.L_min > 0.0) || !(options.L_max > options.L_min)) {
    throw std::invalid_argument("critical_length: need 0 < L_min < L_max");
  }
  CriticalLengthResult out;
  auto lambda = [&](double L) {
    ++out.evaluations;
    return lambda_on_halfwidth(model, kernel, d, L, options);
  };
  double lo = options.L_min, hi = options.L_max;
  double f_lo = lambda(lo);
  if (f_lo >= 0.0) {
    throw CriticalValueError(CriticalValueError::Kind::AlwaysPositive,
                             "lambda_p is already nonnegative at the smallest halfwidth (always positive)");
  }
  double f_hi = lambda(hi);
  if (f_hi <= 0.0) {
    throw CriticalValueError(CriticalValueError::Kind::AlwaysNegative,
                             "lambda_p stays nonpositive up to the largest halfwidth (always negative)");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f = lambda(mid);
    if (f < 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.lambda_lo = f_lo;
  out.lambda_hi = f_hi;
  out.L_star = 0.5 * (lo + hi);
  return out;
}

CriticalDiffusionResult critical_diffusion(const CoefficientModel& model, const Kernel& kernel, double h0,
                                           double tol, const CriticalOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("critical_diffusion: tolerance must be positive");
  if (!(h0 > 0.0)) throw std::invalid_argument("critical_diffusion: h0 must be positive");
  CriticalDiffusionResult out;
  out.tail_mass = kernel.mass(-std::numeric_limits<double>::infinity(), -2.0 * h0);
  if (!(out.tail_mass > 0.0)) {
    throw CriticalValueError(CriticalValueError::Kind::Precondition,
                             "kernel puts no mass beyond 2 h0; lambda_p need not tend to -inf as d grows");
  }
  const double dx = std::min(options.dx, 0.25 * kernel.width());
  const auto n = std::max<std::size_t>(options.min_nodes, static_cast<std::size_t>(std::ceil(2.0 * h0 / dx)));
  const auto base = EigenProblem::from_model(kernel, model, 0.0, -h0, h0, n);
  out.max_a = *std::max_element(base.a.begin(), base.a.end());
  if (out.max_a <= 0.0) {
    out.vanishing_for_all_d = true;
    return out;
  }
  auto lambda = [&](double d) {
    ++out.evaluations;
    EigenProblem p = base;
    p.d = d;
    return principal_eigenvalue(p, options.eigen).lambda_p;
  };
  double lo = 0.0, hi = 1.0;
  while (lambda(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.d_max) {
      throw CriticalValueError(CriticalValueError::Kind::AlwaysPositive,
                               "lambda_p stays nonnegative up to d_max");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (lambda(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.d_star = 0.5 * (lo + hi);
  return out;
}

}  // namespace frontier_sis
