#include "frontier_sis/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "frontier_sis/coeffs.hpp"
#include "frontier_sis/dynamics.hpp"
#include "frontier_sis/eigen.hpp"
#include "frontier_sis/sweep.hpp"

namespace frontier_sis {

namespace {

constexpr double kTol = 1e-10;

/// Weyl sequence on [0, 1): deterministic, well spread.
double weyl(std::size_t i, double alpha) {
  const double v = static_cast<double>(i) * alpha;
  return v - std::floor(v);
}

constexpr double kAlpha1 = 0.6180339887498949;
constexpr double kAlpha2 = 0.4142135623730951;
constexpr double kAlpha3 = 0.7320508075688772;

std::vector<Kernel> shipped_kernels(double factor) {
  std::vector<Kernel> out;
  for (auto f : {KernelFamily::TruncatedGaussian, KernelFamily::BumpMollifier, KernelFamily::ExponentialLaplace}) {
    for (double w : {0.25, 1.0}) {
      Kernel k = Kernel::make(f, w);
      out.push_back(factor == 1.0 ? k : k.scaled_for_testing(factor));
    }
  }
  return out;
}

std::string kernel_label(const Kernel& k) { return fmt::format("{} width {}", to_string(k.family()), k.width()); }

class Suite {
 public:
  explicit Suite(const VerifyOptions& o) : opt(o), full(o.level == VerifyLevel::Full) {}

  void check(const std::string& name, double measured, double limit, std::string detail = {}) {
    report.properties.push_back(PropertyResult{name, measured <= limit, measured, limit, std::move(detail)});
  }

  void check_at_least(const std::string& name, double measured, double minimum, std::string detail = {}) {
    report.properties.push_back(PropertyResult{name, measured >= minimum, measured, minimum, std::move(detail), true});
  }

  void guard(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report.properties.push_back(
          PropertyResult{name, false, NAN, NAN, std::string("exception: ") + e.what(), false});
    }
  }

  void kernel_properties() {
    const auto kernels = shipped_kernels(opt.kernel_mass_factor);
    guard("kernel.symmetry", [&] {
      double worst = 0.0;
      for (const auto& k : kernels) {
        for (std::size_t i = 0; i < 200; ++i) {
          const double x = (2.0 * weyl(i, kAlpha1) - 1.0) * 1.2 * k.radius();
          worst = std::max(worst, std::abs(k(x) - k(-x)));
        }
      }
      check("kernel.symmetry", worst, 0.0, "max |J(x) - J(-x)|");
    });
    guard("kernel.normalization", [&] {
      // Independent midpoint quadrature, not the kernel's own cdf table.
      double worst = 0.0;
      std::string which;
      for (const auto& k : kernels) {
        const std::size_t n = 400000;
        const double h = 2.0 * k.radius() / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += k(-k.radius() + (static_cast<double>(i) + 0.5) * h);
        const double err = std::abs(sum * h - 1.0);
        if (err >= worst) {
          worst = err;
          which = kernel_label(k);
        }
      }
      check("kernel.normalization", worst, 1e-8, "worst |mass - 1|: " + which);
    });
    guard("kernel.row_sum_refinement", [&] {
      const Kernel k = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
      auto worst_error = [&](std::size_t n) {
        const QuadratureGrid grid(-2.0, 2.0, n);
        const auto sums = ToeplitzKernel(k, grid.dx(), n).row_sums();
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = grid.node(i);
          worst = std::max(worst, std::abs(sums[i] - k.mass(grid.left() - x, grid.right() - x)));
        }
        return worst;
      };
      const double e1 = worst_error(40), e2 = worst_error(80);
      check_at_least("kernel.row_sum_refinement", e1 / e2, 3.0,
                     fmt::format("row-sum error drop, {:.3e} at n = 40 to {:.3e} at n = 80", e1, e2));
    });
  }

  void coeff_properties() {
    guard("coeffs.monotonicity", [&] {
      CoefficientParams p;
      p.media = SpatialFunction(SpatialFunction::GaussianBump{0.2, 0.0, 1.0, 1.0});
      p.beds = SpatialFunction(SpatialFunction::GaussianBump{0.5, 0.3, 2.0, 0.7});
      p.gamma0 = SpatialFunction::constant(0.2);
      p.gamma1 = SpatialFunction::constant(0.9);
      p.beta_I_gain = 0.5;
      const CoefficientModel base(p);
      double worst = 0.0;
      for (std::size_t i = 0; i < 64; ++i) {
        const double x = -4.0 + 8.0 * weyl(i, kAlpha1);
        const double I = 5.0 * weyl(i, kAlpha2);
        double prev_beta = INFINITY, prev_gamma = -INFINITY;
        for (double s : {0.0, 0.5, 1.0, 2.0, 4.0}) {
          const double b = base.with_media_scale(s).beta(x, I);
          const double g = base.with_bed_scale(s).gamma(x, I);
          worst = std::max({worst, b - prev_beta, prev_gamma - g});
          prev_beta = b;
          prev_gamma = g;
        }
        worst = std::max({worst, base.beta(x, I) - base.beta(x, I + 0.5), base.gamma(x, I + 0.5) - base.gamma(x, I)});
      }
      check("coeffs.monotonicity", worst, 0.0, "largest step against the expected direction");
    });
    guard("coeffs.derivative_bound", [&] {
      CoefficientParams p;
      p.beta_I_gain = 2.0;
      p.beds = SpatialFunction::constant(0.5);
      p.gamma0 = SpatialFunction::constant(0.1);
      p.gamma1 = SpatialFunction::constant(1.0);
      const CoefficientModel m(p);
      double worst = 0.0;
      const double h = 1e-6;
      for (std::size_t i = 0; i <= 2000; ++i) {
        const double I = 1000.0 * std::pow(static_cast<double>(i) / 2000.0, 3.0);
        const double db = std::abs(m.beta(0.0, I + h) - m.beta(0.0, I)) / h;
        const double dg = std::abs(m.gamma(0.0, I + h) - m.gamma(0.0, I)) / h;
        worst = std::max({worst, db / m.beta_I_derivative_bound(), dg / m.gamma_I_derivative_bound()});
      }
      check("coeffs.derivative_bound", worst, 1.0 + 1e-4, "finite-difference slope / model bound");
    });
  }

  EigenProblem sample_problem(std::size_t n, double halfwidth, double d) const {
    const Kernel k = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
    return EigenProblem::from_function(k, d, -halfwidth, halfwidth, n,
                                       [](double x) { return 0.3 - 0.2 * x * x + 0.1 * std::sin(3.0 * x); });
  }

  void eigen_properties() {
    const EigenOptions eo{kTol, 100000, 400};
    guard("eigen.perron_and_upper_bound", [&] {
      double min_phi = INFINITY, worst_excess = -INFINITY;
      for (double d : {0.1, 1.0, 5.0}) {
        for (double hw : {0.5, 2.0, 6.0}) {
          const EigenProblem pr = sample_problem(static_cast<std::size_t>(hw * 40), hw, d);
          const EigenResult r = principal_eigenvalue(pr, eo);
          min_phi = std::min(min_phi, *std::min_element(r.phi.begin(), r.phi.end()));
          worst_excess = std::max(worst_excess, r.lambda_p - *std::max_element(pr.a.begin(), pr.a.end()));
        }
      }
      check_at_least("eigen.perron_positivity", min_phi, 1e-300, "smallest eigenvector entry");
      check("eigen.upper_bound", worst_excess, kTol, "max over problems of lambda_p - max a");
    });
    guard("eigen.lipschitz", [&] {
      const std::size_t pairs = full ? 100 : 20;
      EigenProblem base = sample_problem(120, 3.0, 1.0);
      double worst = -INFINITY;
      for (std::size_t i = 0; i < pairs; ++i) {
        EigenProblem p1 = base, p2 = base;
        double gap = 0.0;
        for (std::size_t j = 0; j < base.a.size(); ++j) {
          p1.a[j] += 0.5 * (weyl(i * 131 + j, kAlpha1) - 0.5);
          p2.a[j] += 0.5 * (weyl(i * 137 + j, kAlpha2) - 0.5);
          gap = std::max(gap, std::abs(p1.a[j] - p2.a[j]));
        }
        const double dl = std::abs(principal_eigenvalue(p1, eo).lambda_p - principal_eigenvalue(p2, eo).lambda_p);
        worst = std::max(worst, dl - gap);
      }
      check("eigen.lipschitz", worst, 2.0 * kTol, fmt::format("max |dlambda| - |da|_inf over {} pairs", pairs));
    });
    guard("eigen.shift_invariance", [&] {
      EigenProblem p = sample_problem(120, 3.0, 1.0);
      const double l0 = principal_eigenvalue(p, eo).lambda_p;
      for (double& v : p.a) v += 0.37;
      const double l1 = principal_eigenvalue(p, eo).lambda_p;
      check("eigen.shift_invariance", std::abs(l1 - l0 - 0.37), 2.0 * kTol, "|lambda(a + 0.37) - lambda(a) - 0.37|");
    });
    guard("eigen.small_interval_limit", [&] {
      const Kernel k = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
      const double d = 1.0;
      std::string table = "small-interval limit, a(x) = 0.3 - x^2, d = 1, gaussian width 0.5\n";
      table += fmt::format("{:>10} {:>22} {:>14} {:>14}\n", "h", "lambda_p", "|lambda+0.7|", "bound");
      double worst = -INFINITY, prev_err = INFINITY;
      bool decreasing = true;
      for (double h : {1e-2, 1e-3, 1e-4}) {
        const EigenProblem pr = EigenProblem::from_function(k, d, -h, h, 16, [](double x) { return 0.3 - x * x; });
        const double lam = principal_eigenvalue(pr, eo).lambda_p;
        const double err = std::abs(lam - (0.3 - d));
        const double bound = 2.0 * d * k.sup_norm() * h + 10.0 * kTol;
        worst = std::max(worst, err - bound);
        decreasing = decreasing && err < prev_err;
        prev_err = err;
        table += fmt::format("{:>10.0e} {:>22.15f} {:>14.3e} {:>14.3e}\n", h, lam, err, bound);
      }
      check("eigen.small_interval_limit", worst, 0.0, "max over h of |lambda - (a(0) - d)| - 2 d |J| h - 10 tol");
      check("eigen.small_interval_decreasing", decreasing ? 0.0 : 1.0, 0.0, "error shrinks with h");
      if (full) report.tables.push_back(table);
    });
    guard("eigen.large_d_decay", [&] {
      const Kernel k = Kernel::make(KernelFamily::TruncatedGaussian, 1.0);
      const double L = 0.5;
      const double tau = k.mass(-INFINITY, -2.0 * L) + k.mass(2.0 * L, INFINITY);
      double worst = -INFINITY;
      for (double d : {1.0, 4.0, 16.0, 64.0}) {
        const EigenProblem pr = EigenProblem::from_function(k, d, -L, L, 40, [](double x) { return 0.5 - x * x; });
        const double lam = principal_eigenvalue(pr, eo).lambda_p;
        worst = std::max(worst, lam - (0.5 - d * tau));
      }
      check("eigen.large_d_decay", worst, 1e-6, fmt::format("max of lambda - (max a - d tau), tau = {:.4f}", tau));
    });
    guard("eigen.dense_oracle", [&] {
      double worst = 0.0;
      std::size_t cases = 0;
      for (auto f : {KernelFamily::TruncatedGaussian, KernelFamily::BumpMollifier, KernelFamily::ExponentialLaplace}) {
        const Kernel k = Kernel::make(f, 1.0);
        for (std::size_t n = 1; n <= 8; ++n) {
          for (std::size_t c = 0; c < 3; ++c) {
            const double hw = 0.25 + 0.5 * weyl(n * 7 + c, kAlpha3);
            const double d = 2.0 * weyl(n * 11 + c, kAlpha1);
            EigenProblem pr = EigenProblem::from_function(k, d, -hw, hw, n, [](double) { return 0.0; });
            for (std::size_t j = 0; j < n; ++j) pr.a[j] = 2.0 * weyl(cases * 17 + j, kAlpha2) - 1.0;
            const double lam = principal_eigenvalue(pr, eo).lambda_p;
            worst = std::max(worst, std::abs(lam - jacobi_max_eigenvalue(assemble(pr))));
            ++cases;
          }
        }
      }
      check("eigen.dense_oracle", worst, 1e-10, fmt::format("{} problems with n <= 8 against Jacobi", cases));
    });
    guard("eigen.monotone_sweeps", [&] {
      CoefficientParams p;
      p.media = SpatialFunction(SpatialFunction::GaussianBump{0.0, 0.0, 1.0, 1.0});
      EigenSweepBase base{Kernel::make(KernelFamily::TruncatedGaussian, 0.5), CoefficientModel(p), 1.0, -2.0, 2.0, 80};
      const std::vector<double> ds = {0.25, 0.5, 1.0, 2.0, 4.0};
      const std::vector<double> hws = {0.5, 1.0, 2.0, 4.0};
      const std::vector<double> ms = {0.0, 1.0, 2.0};
      const auto td = eigen_sweep(base, SweepAxis::Diffusion, ds, eo);
      const auto th = eigen_sweep(base, SweepAxis::IntervalHalfwidth, hws, eo);
      const auto tm = eigen_sweep(base, SweepAxis::MediaScale, ms, eo);
      check("eigen.d_strictly_decreasing", td.strict ? td.max_violation : 1.0, 0.0, "largest non-decreasing step in d");
      check("eigen.interval_monotone", th.max_violation, 2.0 * kTol, "largest decrease as the interval grows");
      check("eigen.media_monotone", tm.max_violation, 2.0 * kTol, "largest increase as media scale grows");
    });
    if (full) {
      guard("eigen.refinement", [&] {
        std::string table = "grid refinement, a(x) = 0.3 - 0.2 x^2 + 0.1 sin 3x on (-2, 2), d = 1\n";
        table += fmt::format("{:>8} {:>22} {:>14}\n", "n", "lambda_p", "change");
        double prev = NAN, prev_change = NAN, ratio = NAN;
        for (std::size_t n : {80, 160, 320, 640}) {
          const double lam = principal_eigenvalue(sample_problem(n, 2.0, 1.0), eo).lambda_p;
          const double change = std::abs(lam - prev);
          if (!std::isnan(prev_change)) ratio = prev_change / change;
          table += fmt::format("{:>8} {:>22.15f} {:>14.3e}\n", n, lam, std::isnan(prev) ? 0.0 : change);
          prev_change = std::isnan(prev) ? NAN : change;
          prev = lam;
        }
        report.tables.push_back(table);
        check_at_least("eigen.refinement_converges", ratio, 3.0, "ratio of successive changes");
      });
    }
  }

  SimConfig small_sim() const {
    SimConfig c;
    c.kernel = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
    CoefficientParams p;
    p.beta0 = SpatialFunction::constant(1.5);
    c.model = CoefficientModel(p);
    c.d = 1.0;
    c.k = 1.0;
    c.h0 = 1.0;
    c.X = 10.0;
    c.n_nodes = 400;
    c.t_end = 10.0;
    c.early_exit = false;
    return c;
  }

  void dynamics_properties() {
    guard("dynamics.disease_free_fixed_point", [&] {
      const Simulator sim(small_sim());
      SimState s = sim.initial_state();
      std::fill(s.I.begin(), s.I.end(), 0.0);
      const double dt = sim.dt_stable();
      for (int i = 0; i < 200; ++i) s = sim.step(s, dt);
      double worst = 0.0;
      for (double v : s.S) worst = std::max(worst, std::abs(v - 1.0));
      check("dynamics.disease_free_fixed_point", worst, 1e-14, "max |S - sigma/mu1| after 200 steps");
    });
    guard("dynamics.disease_free_relaxation", [&] {
      SimConfig c = small_sim();
      c.S0 = SpatialFunction::constant(2.0);
      const Simulator sim(c);
      SimState s = sim.initial_state();
      std::fill(s.I.begin(), s.I.end(), 0.0);
      const double dt = sim.dt_stable();
      double worst = 0.0;
      for (int i = 1; i <= 200; ++i) {
        s = sim.step(s, dt);
        const double exact = 1.0 + std::exp(-static_cast<double>(i) * dt);
        for (double v : s.S) worst = std::max(worst, std::abs(v - exact));
      }
      check("dynamics.disease_free_relaxation", worst, dt, "max |S - closed form| over 200 steps (limit dt)");
    });
    guard("dynamics.flux_symmetry", [&] {
      const Simulator sim(small_sim());
      SimState s = sim.initial_state();
      for (std::size_t i = 0; i < s.I.size() / 2; ++i) s.I[s.I.size() - 1 - i] = s.I[i];
      const FrontRates r = sim.boundary_flux(s);
      check("dynamics.flux_symmetry", std::abs(r.g_dot + r.h_dot), 0.0, "|g' + h'| for even data");
    });
    guard("dynamics.invariants_and_determinism", [&] {
      const SimConfig c = small_sim();
      const SimResult r1 = simulate(c);
      const SimResult r2 = simulate(c);
      double worst = 0.0;
      for (std::size_t i = 1; i < r1.trajectory.size(); ++i) {
        worst = std::max({worst, r1.trajectory.g[i] - r1.trajectory.g[i - 1], r1.trajectory.h[i - 1] - r1.trajectory.h[i]});
      }
      check("dynamics.front_monotonicity", worst, 0.0, "largest inward front step");
      const bool same = r1.trajectory.t == r2.trajectory.t && r1.trajectory.g == r2.trajectory.g &&
                        r1.trajectory.h == r2.trajectory.h && r1.trajectory.max_I == r2.trajectory.max_I &&
                        r1.final_state.S == r2.final_state.S && r1.final_state.I == r2.final_state.I;
      check("dynamics.determinism", same ? 0.0 : 1.0, 0.0, "two identical runs compared bitwise");
    });
    if (full) {
      guard("dynamics.temporal_order", [&] {
        SimConfig c = small_sim();
        c.t_end = 5.0;
        const double dt0 = stable_dt(c);
        std::vector<double> hs, ms;
        for (double f : {1.0, 0.5, 0.25}) {
          c.dt = dt0 * f;
          const SimResult r = simulate(c);
          hs.push_back(r.final_state.h);
          ms.push_back(r.trajectory.max_I.back());
        }
        const double rh = std::abs(hs[0] - hs[1]) / std::abs(hs[1] - hs[2]);
        const double rm = std::abs(ms[0] - ms[1]) / std::abs(ms[1] - ms[2]);
        const double off = std::max(std::abs(rh - 2.0), std::abs(rm - 2.0));
        check("dynamics.temporal_order", off, 0.3, fmt::format("halving ratios h {:.3f}, max I {:.3f}", rh, rm));
      });
    }
  }

  void sweep_properties() {
    guard("sweep.order_independence", [&] {
      SweepPlan plan;
      plan.base = small_sim();
      plan.base.t_end = 4.0;
      plan.base.n_nodes = 200;
      plan.axes = {AxisValues{PlanAxis::D, {0.5, 1.0, 2.0}}, AxisValues{PlanAxis::K, {0.5, 2.0}}};
      plan.jobs = 1;
      const PhaseTable t1 = run_sweep(plan);
      plan.jobs = 4;
      const PhaseTable t4 = run_sweep(plan);
      check("sweep.order_independence", t1.same_results(t4) ? 0.0 : 1.0, 0.0, "tables with 1 and 4 workers");
    });
  }

  VerifyOptions opt;
  bool full;
  VerifyReport report;
};

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.pass; });
}

std::string VerifyReport::text() const {
  std::string out;
  std::size_t failed = 0;
  for (const auto& p : properties) {
    if (!p.pass) ++failed;
    out += fmt::format("{} {:<36} measured {:<12.4g} {} {:<12.4g} {}\n", p.pass ? "PASS" : "FAIL", p.name,
                       p.measured, p.lower_limit ? "min" : "max", p.limit, p.detail);
  }
  for (const auto& t : tables) out += "\n" + t;
  out += fmt::format("\n{} properties, {} failed\n", properties.size(), failed);
  return out;
}

VerifyReport run_verify(const VerifyOptions& options) {
  Suite s(options);
  s.kernel_properties();
  s.coeff_properties();
  s.eigen_properties();
  s.dynamics_properties();
  s.sweep_properties();
  return std::move(s.report);
}

double jacobi_max_eigenvalue(const DenseMatrix& m) {
  const std::size_t n = m.n;
  if (n == 0) throw std::invalid_argument("empty matrix");
  std::vector<double> a = m.data;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double best = A(0, 0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, A(i, i));
  return best;
}

}  // namespace frontier_sis
