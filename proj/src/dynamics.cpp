#include "frontier_sis/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace frontier_sis {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kLeakageLimit = 1e-6;

std::string fmt_time(double t) {
  std::ostringstream os;
  os << "t = " << t;
  return os.str();
}

void validate(const SimConfig& c) {
  auto fail = [](const std::string& msg) { throw SimulationError(SimulationError::Kind::Config, msg); };
  if (!(c.d > 0.0)) fail("d must be positive");
  if (!(c.k > 0.0)) fail("k must be positive");
  if (!(c.h0 > 0.0)) fail("h0 must be positive");
  if (!(c.X > c.h0)) fail("window halfwidth X must exceed h0");
  if (!(c.X - c.kernel.radius() > c.h0)) fail("window halfwidth X must exceed h0 + kernel radius");
  if (c.n_nodes < 2) fail("need at least two window nodes");
  if (!(c.t_end > 0.0)) fail("t_end must be positive");
  if (c.dt < 0.0) fail("dt must be positive or 0 (auto)");
  if (!(c.sample_interval > 0.0)) fail("sample_interval must be positive");
  if (!(c.S0.inf() > 0.0)) fail("S0 must be positive everywhere");
  const double tol = 1e-12 * std::max(1.0, c.I0.sup());
  if (std::abs(c.I0(-c.h0)) > tol || std::abs(c.I0(c.h0)) > tol) fail("I0 must vanish at -h0 and h0");
  const double dx = 2.0 * c.X / static_cast<double>(c.n_nodes);
  if (dx > 0.5 * c.kernel.width()) fail("window grid under-resolves the kernel (dx > width / 2)");
  bool any_inside = false;
  const QuadratureGrid grid(-c.X, c.X, c.n_nodes);
  for (std::size_t i = 0; i < c.n_nodes; ++i) {
    const double x = grid.node(i);
    if (x > -c.h0 && x < c.h0) {
      any_inside = true;
      if (!(c.I0(x) > 0.0)) fail("I0 must be positive inside (-h0, h0)");
    }
  }
  if (!any_inside) fail("no window node lies inside (-h0, h0)");
}

double lambda_on_interval(const SimConfig& cfg, double g, double h) {
  const double dx = 2.0 * cfg.X / static_cast<double>(cfg.n_nodes);
  const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::llround((h - g) / dx)));
  return principal_eigenvalue(EigenProblem::from_model(cfg.kernel, cfg.model, cfg.d, g, h, n), cfg.eigen)
      .lambda_p;
}

}  // namespace

std::string_view to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::Spreading:
      return "Spreading";
    case OutcomeClass::Vanishing:
      return "Vanishing";
    case OutcomeClass::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

double a_priori_bound(const SimConfig& config) {
  return std::max(config.model.disease_free_level(), config.S0.sup() + std::max(0.0, config.I0.sup()));
}

double stable_dt(const SimConfig& config) {
  const auto& p = config.model.params();
  const double rate = config.d + std::max(p.mu1, p.mu2 + config.model.gamma_high_sup()) +
                      config.model.beta_sup() * a_priori_bound(config);
  return 0.5 / rate;
}

Simulator::Simulator(SimConfig config)
    : cfg_(std::move(config)), grid_((validate(cfg_), -cfg_.X), cfg_.X, cfg_.n_nodes) {
  x_ = grid_.nodes();
  const ToeplitzKernel band(cfg_.kernel, grid_.dx(), grid_.size());
  weights_.resize(band.bandwidth() + 1);
  for (std::size_t k = 0; k < weights_.size(); ++k) weights_[k] = band.weight(k);
  row_sums_ = band.row_sums();
  exterior_.resize(row_sums_.size());
  for (std::size_t i = 0; i < row_sums_.size(); ++i) exterior_[i] = std::max(0.0, 1.0 - row_sums_[i]);
  bound_A_ = a_priori_bound(cfg_);
  dt_stable_ = stable_dt(cfg_);
}

std::pair<std::size_t, std::size_t> Simulator::active_range(double g, double h) const {
  const auto lo = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), g) - x_.begin());
  const auto hi = static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), h) - x_.begin());
  return {lo, std::max(lo, hi)};
}

SimState Simulator::initial_state() const {
  SimState s;
  s.t = 0.0;
  s.g = -cfg_.h0;
  s.h = cfg_.h0;
  s.S_far_left = cfg_.S0.far_field(-1);
  s.S_far_right = cfg_.S0.far_field(1);
  s.S.resize(x_.size());
  s.I.assign(x_.size(), 0.0);
  for (std::size_t i = 0; i < x_.size(); ++i) s.S[i] = cfg_.S0(x_[i]);
  const auto [lo, hi] = active_range(s.g, s.h);
  for (std::size_t i = lo; i < hi; ++i) s.I[i] = cfg_.I0(x_[i]);
  return s;
}

FrontRates Simulator::boundary_flux(const SimState& state) const {
  // Inner integral over the tail beyond the front is exact in the kernel cdf;
  // the outer integral is the midpoint rule. Mirrored summation orders keep
  // g' = -h' bit-for-bit for mirror-symmetric data.
  const auto [lo, hi] = active_range(state.g, state.h);
  const double dx = grid_.dx();
  double h_sum = 0.0, g_sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) g_sum += state.I[i] * cfg_.kernel.cdf(state.g - x_[i]);
  for (std::size_t i = hi; i-- > lo;) h_sum += state.I[i] * cfg_.kernel.cdf(x_[i] - state.h);
  return FrontRates{-cfg_.k * g_sum * dx, cfg_.k * h_sum * dx};
}

SimState Simulator::step(const SimState& state, double dt) const {
  if (!(dt > 0.0) || dt > dt_stable_ * (1.0 + 1e-12)) {
    throw SimulationError(SimulationError::Kind::DtTooLarge,
                          "dt exceeds the positivity bound dt_stable = " + std::to_string(dt_stable_), state.t);
  }
  const auto& p = cfg_.model.params();
  const std::size_t n = x_.size();
  const std::size_t band = weights_.size() - 1;
  const double d = cfg_.d;
  const auto [lo, hi] = active_range(state.g, state.h);
  const FrontRates rates = boundary_flux(state);
  const double ext_left = state.S_far_left;
  const double ext_right = state.S_far_right;

  SimState next;
  next.S.resize(n);
  next.I.assign(n, 0.0);
  double leak = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > band ? i - band : 0;
    const std::size_t j1 = std::min(n, i + band + 1);
    const double Si = state.S[i];
    double spread_S = 0.0;
    for (std::size_t j = j0; j < j1; ++j) spread_S += weights_[i > j ? i - j : j - i] * (state.S[j] - Si);
    if (exterior_[i] > 0.0) {
      const double ext = x_[i] < 0.0 ? ext_left : ext_right;
      spread_S += exterior_[i] * (ext - Si);
      leak += d * exterior_[i] * std::abs(ext - Si);
    }

    double reaction_S = p.sigma - p.mu1 * Si;
    const double Ii = state.I[i];
    if (i >= lo && i < hi) {
      const double beta = cfg_.model.beta(x_[i], Ii);
      const double gamma = cfg_.model.gamma(x_[i], Ii);
      reaction_S += (gamma - beta * Si) * Ii;

      double spread_I = 0.0;
      const std::size_t k0 = std::max(lo, j0);
      const std::size_t k1 = std::min(hi, j1);
      for (std::size_t j = k0; j < k1; ++j) spread_I += weights_[i > j ? i - j : j - i] * state.I[j];
      // Written as a sum of nonnegative terms under the dt bound.
      next.I[i] = Ii * (1.0 - dt * (d + p.mu2 + gamma)) + dt * (d * spread_I + beta * Si * Ii);
    }
    next.S[i] = Si + dt * (d * spread_S + reaction_S);
  }

  next.t = state.t + dt;
  next.S_far_left = ext_left + dt * (p.sigma - p.mu1 * ext_left);
  next.S_far_right = ext_right + dt * (p.sigma - p.mu1 * ext_right);
  next.g = state.g + dt * rates.g_dot;
  next.h = state.h + dt * rates.h_dot;
  next.leakage = state.leakage + dt * leak * grid_.dx();

  // Nodes newly covered by the fronts enter with I = 0, which next.I already holds.
  const double R = cfg_.kernel.radius();
  if (next.h > cfg_.X - R || next.g < -cfg_.X + R) {
    throw SimulationError(SimulationError::Kind::WindowExhausted,
                          "front within one kernel radius of the window edge at " + fmt_time(next.t) +
                              "; rerun with a larger X",
                          next.t);
  }
  check_invariants(next, state);
  return next;
}

void Simulator::check_invariants(const SimState& s, const SimState& prev) const {
  auto fail = [&](const std::string& msg) {
    throw SimulationError(SimulationError::Kind::InvariantViolation, msg + " at " + fmt_time(s.t), s.t);
  };
  const double cap = bound_A_ + kBoundSlack;
  const auto [lo, hi] = active_range(s.g, s.h);
  double total_S = 0.0;
  for (std::size_t i = 0; i < s.S.size(); ++i) {
    if (!(s.S[i] >= 0.0) || s.S[i] > cap) fail("S left [0, A]");
    if (!(s.I[i] >= 0.0) || s.I[i] > cap) fail("I left [0, A]");
    if ((i < lo || i >= hi) && s.I[i] != 0.0) fail("I nonzero outside (g, h)");
    total_S += s.S[i];
  }
  if (s.g > prev.g || s.h < prev.h) fail("front moved inward");
  if (s.g > -cfg_.h0 || s.h < cfg_.h0) fail("front inside the initial interval");
  if (s.leakage > kLeakageLimit * total_S * grid_.dx()) {
    throw SimulationError(SimulationError::Kind::WindowExhausted,
                          "S exchange across the window edge exceeds 1e-6 of the total at " + fmt_time(s.t) +
                              "; rerun with a larger X",
                          s.t);
  }
}

FrontRates boundary_flux(const SimState& state, const SimConfig& config) {
  return Simulator(config).boundary_flux(state);
}

SimState step(const SimState& state, const SimConfig& config, double dt) {
  return Simulator(config).step(state, dt);
}

namespace {

void record(Trajectory& tr, const SimState& s, const Simulator& sim) {
  const auto& x = sim.grid();
  double max_I = 0.0, total = 0.0;
  for (double v : s.I) {
    max_I = std::max(max_I, v);
    total += v;
  }
  tr.t.push_back(s.t);
  tr.g.push_back(s.g);
  tr.h.push_back(s.h);
  tr.max_I.push_back(max_I);
  tr.total_I.push_back(total * x.dx());
  std::vector<double> probes;
  probes.reserve(tr.probe_x.size());
  for (double px : tr.probe_x) {
    // linear interpolation between the two nearest nodes
    double pos = (px - x.left()) / x.dx() - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(x.size() - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(pos));
    const std::size_t i1 = std::min(i0 + 1, x.size() - 1);
    const double w = pos - static_cast<double>(i0);
    probes.push_back((1.0 - w) * s.S[i0] + w * s.S[i1]);
  }
  tr.S_probe.push_back(std::move(probes));
}

}  // namespace

SimResult simulate(const SimConfig& config) {
  Simulator sim(config);
  SimResult out;
  out.bound_A = sim.bound_A();
  double dt = config.dt > 0.0 ? config.dt : sim.dt_stable();
  if (dt > sim.dt_stable() * (1.0 + 1e-12)) {
    throw SimulationError(SimulationError::Kind::DtTooLarge,
                          "dt = " + std::to_string(dt) + " exceeds dt_stable = " + std::to_string(sim.dt_stable()));
  }
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(config.t_end / dt - 1e-9)));
  dt = config.t_end / static_cast<double>(steps);
  out.dt = dt;
  const auto cadence = static_cast<std::size_t>(std::max(1.0, std::round(config.sample_interval / dt)));

  std::vector<double> snap_times = config.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;

  Trajectory& tr = out.trajectory;
  tr.probe_x = config.probes;
  SimState state = sim.initial_state();
  auto take_snapshots = [&]() {
    while (next_snap < snap_times.size() && state.t >= snap_times[next_snap] - 1e-9 * dt) {
      tr.snapshots.push_back(Snapshot{state.t, state.g, state.h, sim.grid().nodes(), state.S, state.I});
      ++next_snap;
    }
  };
  record(tr, state, sim);
  take_snapshots();

  std::size_t s = 1;
  for (; s <= steps; ++s) {
    try {
      state = sim.step(state, dt);
    } catch (const SimulationError& e) {
      throw SimulationError(e.kind(), std::string(e.what()), static_cast<double>(s) * dt);
    }
    state.t = static_cast<double>(s) * dt;
    take_snapshots();
    if (s % cadence == 0 || s == steps) {
      record(tr, state, sim);
      if (config.early_exit && s != steps) {
        const Outcome o = classify(tr, config.thresholds, config.h0, config.L_star);
        if (o.cls != OutcomeClass::Undecided) {
          ++s;
          break;
        }
      }
    }
  }
  out.steps = s - 1;
  out.final_state = state;
  out.outcome = classify(tr, config.thresholds, config.h0, config.L_star);
  out.outcome.lambda_p_at_final_interval = lambda_on_interval(config, state.g, state.h);
  out.audit = verify_vanishing_spectral(out.outcome, config);
  return out;
}

Outcome classify(const Trajectory& tr, const ClassifyThresholds& th, double h0, std::optional<double> L_star) {
  Outcome o;
  o.L_spread = th.L_spread ? *th.L_spread : (L_star ? 4.0 * *L_star : 10.0 * 2.0 * h0);
  o.lambda_p_at_final_interval = std::numeric_limits<double>::quiet_NaN();
  if (tr.size() == 0) return o;
  const std::size_t last = tr.size() - 1;
  o.horizon = tr.t[last];
  o.final_g = tr.g[last];
  o.final_h = tr.h[last];
  o.final_interval_length = tr.h[last] - tr.g[last];
  o.final_max_I = tr.max_I[last];
  if (o.horizon < th.trailing_window) {
    o.trailing_min_max_I = o.final_max_I;
    return o;
  }
  // First sample inside the trailing window.
  const double t_start = o.horizon - th.trailing_window;
  std::size_t first = last;
  while (first > 0 && tr.t[first - 1] >= t_start - 1e-12) --first;
  const double span = tr.t[last] - tr.t[first];
  o.front_speed = span > 0.0 ? (o.final_interval_length - (tr.h[first] - tr.g[first])) / span : 0.0;
  o.trailing_min_max_I = *std::min_element(tr.max_I.begin() + static_cast<std::ptrdiff_t>(first), tr.max_I.end());

  if (o.final_max_I < th.eps_vanish && o.front_speed < th.eps_speed) {
    o.cls = OutcomeClass::Vanishing;
  } else if (o.final_interval_length >= o.L_spread && o.trailing_min_max_I >= th.delta_persist) {
    o.cls = OutcomeClass::Spreading;
  }
  return o;
}

SpectralAudit verify_vanishing_spectral(const Outcome& outcome, const SimConfig& config) {
  SpectralAudit audit;
  audit.applicable = outcome.cls == OutcomeClass::Vanishing;
  audit.tol = config.eigen.tol;
  audit.lambda_p = std::isnan(outcome.lambda_p_at_final_interval)
                       ? lambda_on_interval(config, outcome.final_g, outcome.final_h)
                       : outcome.lambda_p_at_final_interval;
  audit.violation = audit.applicable && audit.lambda_p > 10.0 * audit.tol;
  return audit;
}

}  // namespace frontier_sis
