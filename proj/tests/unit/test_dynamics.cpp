#include <doctest.h>

#include <cmath>

#include "frontier_sis/dynamics.hpp"

using namespace frontier_sis;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.kernel = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);
  c.X = 10.0;
  c.n_nodes = 400;
  c.h0 = 1.0;
  c.t_end = 20.0;
  return c;
}

SimState zero_infection(const Simulator& sim) {
  SimState s = sim.initial_state();
  std::fill(s.I.begin(), s.I.end(), 0.0);
  return s;
}

// Independent midpoint rule for int_0^R z J(z) dz, which equals the right
// front rate for I == 1 on (-1, 1) when R <= 2 and k = 1.
double first_moment(const Kernel& J, std::size_t n) {
  const double h = J.radius() / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) + 0.5) * h;
    s += z * J(z);
  }
  return s * h;
}

Trajectory series(std::size_t n, double dt, auto&& len, auto&& max_I) {
  Trajectory tr;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    tr.t.push_back(t);
    tr.g.push_back(-0.5 * len(t));
    tr.h.push_back(0.5 * len(t));
    tr.max_I.push_back(max_I(t));
    tr.total_I.push_back(max_I(t));
  }
  return tr;
}

}  // namespace

TEST_CASE("bound and stable step") {
  SimConfig c = small_config();
  c.S0 = SpatialFunction::constant(1.5);
  CHECK(a_priori_bound(c) == doctest::Approx(1.5 + 0.1));
  const double expect = 0.5 / (1.0 + 1.0 + 1.5 * 1.6);
  CHECK(stable_dt(c) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("no infection, no front motion") {
  const Simulator sim(small_config());
  const FrontRates r = sim.boundary_flux(zero_infection(sim));
  CHECK(r.g_dot == 0.0);
  CHECK(r.h_dot == 0.0);
}

TEST_CASE("front rates of mirrored data are opposite") {
  const Simulator sim(small_config());
  SimState s = sim.initial_state();
  const std::size_t n = s.I.size();
  for (std::size_t i = 0; i < n / 2; ++i) s.I[i] = s.I[n - 1 - i] = 0.5 * (s.I[i] + s.I[n - 1 - i]);
  const FrontRates r = sim.boundary_flux(s);
  CHECK(r.h_dot > 0.0);
  CHECK(r.g_dot == -r.h_dot);
}

TEST_CASE("front rate against a double-integral oracle") {
  const Kernel bump = Kernel::make(KernelFamily::BumpMollifier, 1.0);
  const double exact = first_moment(bump, 2'000'000);
  double prev_err = 0.0;
  for (std::size_t n : {100u, 200u, 400u}) {
    SimConfig c = small_config();
    c.kernel = bump;
    c.k = 1.0;
    c.n_nodes = n;
    const Simulator sim(c);
    SimState s = sim.initial_state();
    const auto [lo, hi] = sim.active_range(s.g, s.h);
    for (std::size_t i = lo; i < hi; ++i) s.I[i] = 1.0;
    const double err = std::abs(sim.boundary_flux(s).h_dot - exact);
    CHECK(err < 1e-2);
    if (prev_err > 0.0) CHECK(prev_err / err > 3.0);
    prev_err = err;
  }
}

TEST_CASE("disease-free equilibrium is a fixed point") {
  const Simulator sim(small_config());
  const SimState s = zero_infection(sim);
  const SimState next = sim.step(s, sim.dt_stable());
  CHECK(next.S == s.S);
  CHECK(next.g == s.g);
  CHECK(next.h == s.h);
  CHECK(next.t == sim.dt_stable());
}

TEST_CASE("spatially constant S relaxes to sigma / mu1") {
  SimConfig c = small_config();
  c.S0 = SpatialFunction::constant(2.0);
  const Simulator sim(c);
  SimState s = zero_infection(sim);
  const double dt = 0.01;
  for (int k = 0; k < 300; ++k) s = sim.step(s, dt);
  const double expect = 1.0 + std::exp(-s.t);
  for (double v : s.S) CHECK(std::abs(v - expect) <= 5.0 * dt);
  CHECK(s.leakage == 0.0);
}

TEST_CASE("one step moves the fronts by dt times the rates") {
  const Simulator sim(small_config());
  const SimState s = sim.initial_state();
  const FrontRates r = sim.boundary_flux(s);
  const double dt = 0.5 * sim.dt_stable();
  const SimState next = sim.step(s, dt);
  CHECK(next.h == s.h + dt * r.h_dot);
  CHECK(next.g == s.g + dt * r.g_dot);
  const auto [lo, hi] = sim.active_range(next.g, next.h);
  for (std::size_t i = 0; i < next.I.size(); ++i)
    if (i < lo || i >= hi) CHECK(next.I[i] == 0.0);
}

TEST_CASE("oversized step is rejected") {
  const Simulator sim(small_config());
  try {
    sim.step(sim.initial_state(), 2.0 * sim.dt_stable());
    FAIL("expected a failure");
  } catch (const SimulationError& e) {
    CHECK(e.kind() == SimulationError::Kind::DtTooLarge);
  }
}

TEST_CASE("a front reaching the window edge stops the run") {
  SimConfig c = small_config();
  CoefficientParams p;
  p.beta0 = SpatialFunction::constant(3.0);
  c.model = CoefficientModel(p);
  c.k = 20.0;
  c.X = 4.5;
  c.n_nodes = 90;
  c.t_end = 200.0;
  try {
    simulate(c);
    FAIL("expected a failure");
  } catch (const SimulationError& e) {
    CHECK(e.kind() == SimulationError::Kind::WindowExhausted);
  }
}

TEST_CASE("invalid configurations are rejected") {
  SimConfig c = small_config();
  c.X = 0.9;
  CHECK_THROWS_AS(Simulator{c}, SimulationError);
  c = small_config();
  c.n_nodes = 20;  // dx = 1 > width / 2
  CHECK_THROWS_AS(Simulator{c}, SimulationError);
  c = small_config();
  c.I0 = SpatialFunction::constant(0.1);  // does not vanish at +-h0
  CHECK_THROWS_AS(Simulator{c}, SimulationError);
}

TEST_CASE("classification of synthetic series") {
  ClassifyThresholds th;
  th.L_spread = 10.0;

  auto vanishing = series(101, 0.5, [](double) { return 2.5; }, [](double t) { return 1e-3 * std::exp(-t); });
  CHECK(classify(vanishing, th, 1.0).cls == OutcomeClass::Vanishing);

  auto spreading = series(101, 0.5, [](double t) { return 2.0 + 0.5 * t; }, [](double) { return 0.4; });
  const Outcome o = classify(spreading, th, 1.0);
  CHECK(o.cls == OutcomeClass::Spreading);
  CHECK(o.front_speed == doctest::Approx(0.5));

  auto short_run = series(11, 0.5, [](double t) { return 2.0 + 0.1 * t; }, [](double) { return 1e-3; });
  CHECK(classify(short_run, th, 1.0).cls == OutcomeClass::Undecided);

  ClassifyThresholds dflt;
  CHECK(classify(spreading, dflt, 1.0).L_spread == 20.0);
  CHECK(classify(spreading, dflt, 1.0, 0.75).L_spread == 3.0);
}

TEST_CASE("spectral audit") {
  SimConfig c = small_config();
  Outcome o;
  o.cls = OutcomeClass::Vanishing;
  o.final_g = -1.2;
  o.final_h = 1.2;
  o.lambda_p_at_final_interval = 0.1;
  CHECK(verify_vanishing_spectral(o, c).violation);

  CoefficientParams p;
  p.beta0 = SpatialFunction::constant(0.8);  // a == -0.2
  c.model = CoefficientModel(p);
  o.lambda_p_at_final_interval = std::nan("");
  const SpectralAudit a = verify_vanishing_spectral(o, c);
  CHECK(a.lambda_p < 0.0);
  CHECK_FALSE(a.violation);
}

TEST_CASE("short vanishing run is reproducible") {
  SimConfig c = small_config();
  CoefficientParams p;
  p.beta0 = SpatialFunction::constant(0.8);
  c.model = CoefficientModel(p);
  c.I0 = SpatialFunction(SpatialFunction::PiecewiseLinear{{{-1.0, 0.0}, {0.0, 1e-3}, {1.0, 0.0}}});
  c.t_end = 30.0;
  c.probes = {-3.0, 0.0, 3.0};
  const SimResult a = simulate(c);
  const SimResult b = simulate(c);
  CHECK(a.trajectory.max_I == b.trajectory.max_I);
  CHECK(a.trajectory.h == b.trajectory.h);
  CHECK(a.trajectory.max_I.back() < a.trajectory.max_I.front());
  for (std::size_t i = 1; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory.h[i] >= a.trajectory.h[i - 1]);
    CHECK(a.trajectory.g[i] <= a.trajectory.g[i - 1]);
  }
}
