#include "frontier_sis/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "frontier_sis/io.hpp"

namespace frontier_sis {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = errors.size() == 1 ? "invalid config:" : fmt::format("invalid config ({} errors):", errors.size());
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

struct Errors {
  std::vector<std::string> list;
  void add(const std::string& path, const std::string& msg) { list.push_back(path + ": " + msg); }
};

/// One JSON object plus the keys read from it, for unknown-key detection.
class Obj {
 public:
  Obj(const json* j, std::string path, Errors& errors) : j_(j), path_(std::move(path)), e_(&errors) {
    if (j_ && !j_->is_object()) {
      e_->add(path_, "must be an object");
      j_ = nullptr;
    }
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_ && j_->contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!j_) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  Obj child(const std::string& key) { return Obj(get(key), at(key), *e_); }

  double number(const std::string& key, double def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number()) {
      e_->add(at(key), "must be a number");
      return def;
    }
    return v->get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || get(key)->is_null()) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      e_->add(at(key), "must be a nonnegative integer");
      return def;
    }
    return v->get<std::size_t>();
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_boolean()) {
      e_->add(at(key), "must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_string()) {
      e_->add(at(key), "must be a string");
      return def;
    }
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_array()) {
      e_->add(at(key), "must be an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) {
        e_->add(at(key), "must be an array of numbers");
        return def;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    if (!j_) return;
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!seen_.count(it.key())) e_->add(at(it.key()), "unknown key");
    }
  }

  Errors& errors() { return *e_; }

 private:
  const json* j_;
  std::string path_;
  Errors* e_;
  std::set<std::string> seen_;
};

void require_positive(Errors& e, const std::string& path, double v, const std::string& why) {
  if (!(v > 0.0)) e.add(path, fmt::format("must be positive, got {} ({})", v, why));
}

void require_nonnegative(Errors& e, const std::string& path, double v, const std::string& why) {
  if (!(v >= 0.0)) e.add(path, fmt::format("must be nonnegative, got {} ({})", v, why));
}

/// A number is a constant; otherwise {"kind": ..., parameters}.
/// "tent" is shorthand for the piecewise-linear hat (c - hw, 0), (c, amplitude), (c + hw, 0).
SpatialFunction spatial_function(Obj& parent, const std::string& key, SpatialFunction def, double tent_halfwidth) {
  const json* v = parent.get(key);
  if (!v) return def;
  Errors& e = parent.errors();
  const std::string path = parent.at(key);
  if (v->is_number()) return SpatialFunction::constant(v->get<double>());
  if (!v->is_object()) {
    e.add(path, "must be a number or an object with a \"kind\"");
    return def;
  }
  Obj o(v, path, e);
  const std::string kind = o.string("kind", "");
  SpatialFunction out = def;
  try {
    if (kind == "constant") {
      out = SpatialFunction::constant(o.number("level", 0.0));
    } else if (kind == "gaussian-bump") {
      SpatialFunction::GaussianBump g;
      g.level = o.number("level", 0.0);
      g.center = o.number("center", 0.0);
      g.amplitude = o.number("amplitude", 1.0);
      g.width = o.number("width", 1.0);
      require_positive(e, o.at("width"), g.width, "bump width");
      out = SpatialFunction(g);
    } else if (kind == "piecewise-linear") {
      SpatialFunction::PiecewiseLinear p;
      const json* knots = o.get("knots");
      bool ok = knots && knots->is_array() && !knots->empty();
      if (ok) {
        for (const auto& k : *knots) {
          if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
            ok = false;
            break;
          }
          p.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
        }
      }
      if (!ok) {
        e.add(o.at("knots"), "must be a nonempty array of [x, y] pairs");
      } else {
        for (std::size_t i = 1; i < p.knots.size(); ++i) {
          if (!(p.knots[i].first > p.knots[i - 1].first)) {
            e.add(o.at("knots"), "knot positions must be strictly increasing");
            ok = false;
            break;
          }
        }
        if (ok) out = SpatialFunction(p);
      }
    } else if (kind == "tent") {
      const double c = o.number("center", 0.0);
      const double hw = o.number("halfwidth", tent_halfwidth);
      const double amp = o.number("amplitude", 0.1);
      require_positive(e, o.at("halfwidth"), hw, "tent halfwidth");
      out = SpatialFunction(SpatialFunction::PiecewiseLinear{{{c - hw, 0.0}, {c, amp}, {c + hw, 0.0}}});
    } else {
      e.add(o.at("kind"), "must be one of constant, gaussian-bump, piecewise-linear, tent");
    }
  } catch (const std::exception& ex) {
    e.add(path, ex.what());
  }
  o.finish();
  return out;
}

void sorted_distinct(Errors& e, const std::string& path, const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      e.add(path, "values must be sorted ascending and distinct");
      return;
    }
  }
}

RunConfig build(const json& doc, Errors& e) {
  RunConfig rc;
  Obj root(&doc, "", e);
  root.string("description", "");

  // kernel
  Obj kj = root.child("kernel");
  const std::string family_name = kj.string("family", "truncated-gaussian");
  const double width = kj.number("width", 0.5);
  const auto radius = kj.optional_number("truncation_radius");
  kj.finish();
  std::optional<Kernel> kernel;
  require_positive(e, "kernel.width", width, "kernel width");
  if (radius) require_positive(e, "kernel.truncation_radius", *radius, "kernel support radius");
  try {
    const KernelFamily family = parse_kernel_family(family_name);
    if (width > 0.0 && (!radius || *radius > 0.0)) kernel = Kernel::make(family, width, radius);
  } catch (const std::exception& ex) {
    e.add("kernel", ex.what());
  }

  // coeffs
  const std::size_t coeff_errors_before = e.list.size();
  Obj cj = root.child("coeffs");
  CoefficientParams p;
  p.sigma = cj.number("sigma", p.sigma);
  p.mu1 = cj.number("mu1", p.mu1);
  p.mu2 = cj.number("mu2", p.mu2);
  p.beta0 = spatial_function(cj, "beta0", p.beta0, 1.0);
  p.media = spatial_function(cj, "media", p.media, 1.0);
  p.beds = spatial_function(cj, "beds", p.beds, 1.0);
  p.gamma0 = spatial_function(cj, "gamma0", p.gamma0, 1.0);
  p.gamma1 = spatial_function(cj, "gamma1", p.gamma1, 1.0);
  p.beta_I_gain = cj.number("beta_I_gain", p.beta_I_gain);
  cj.finish();
  require_positive(e, "coeffs.sigma", p.sigma, "recruitment rate of susceptibles");
  require_positive(e, "coeffs.mu1", p.mu1, "death rate of susceptibles");
  require_positive(e, "coeffs.mu2", p.mu2, "removal rate of infected");
  require_nonnegative(e, "coeffs.beta0", p.beta0.inf(), "contact rate");
  require_nonnegative(e, "coeffs.media", p.media.inf(), "media coverage");
  require_nonnegative(e, "coeffs.beds", p.beds.inf(), "hospital bed level");
  require_nonnegative(e, "coeffs.gamma0", p.gamma0.inf(), "recovery rate");
  require_nonnegative(e, "coeffs.beta_I_gain", p.beta_I_gain, "contact rate must not decrease in I");
  std::optional<CoefficientModel> model;
  try {
    model.emplace(p);
  } catch (const std::exception& ex) {
    // Only report what the field checks above did not already catch.
    if (e.list.size() == coeff_errors_before) e.add("coeffs", ex.what());
  }
  if (p.mu2 < p.mu1) {
    log().warn("coeffs.mu2 < coeffs.mu1: S + I may exceed the a priori bound A; runs can abort on the invariant check");
  }

  // sim
  Obj sj = root.child("sim");
  SimConfig& sim = rc.sim;
  sim.d = sj.number("d", sim.d);
  sim.k = sj.number("k", sim.k);
  sim.h0 = sj.number("h0", sim.h0);
  sim.X = sj.number("X", sim.X);
  sim.n_nodes = sj.count("n_nodes", sim.n_nodes);
  if (const json* dt = sj.get("dt"); dt && dt->is_string()) {
    if (dt->get<std::string>() != "auto") e.add("sim.dt", "must be a positive number or \"auto\"");
    sim.dt = 0.0;
  } else {
    sim.dt = sj.number("dt", 0.0);
    if (sj.has("dt")) require_positive(e, "sim.dt", sim.dt, "time step");
  }
  sim.t_end = sj.number("t_end", sim.t_end);
  sim.sample_interval = sj.number("sample_interval", sim.sample_interval);
  sim.snapshot_times = sj.numbers("snapshot_times", {});
  sim.probes = sj.numbers("probes", sim.probes);
  sim.early_exit = sj.boolean("early_exit", sim.early_exit);
  sim.L_star = sj.optional_number("L_star");
  const double s_eq = p.mu1 > 0.0 ? p.sigma / p.mu1 : 1.0;
  sim.S0 = spatial_function(sj, "S0", SpatialFunction::constant(s_eq), 1.0);
  const double h0_for_tent = sim.h0 > 0.0 ? sim.h0 : 1.0;
  sim.I0 = spatial_function(sj, "I0",
                            SpatialFunction(SpatialFunction::PiecewiseLinear{
                                {{-h0_for_tent, 0.0}, {0.0, 0.1}, {h0_for_tent, 0.0}}}),
                            h0_for_tent);
  sj.finish();
  require_positive(e, "sim.d", sim.d, "dispersal rate");
  require_positive(e, "sim.k", sim.k, "expansion capability of the fronts");
  require_positive(e, "sim.h0", sim.h0, "initial infected halfwidth");
  if (!(sim.h0 < sim.X)) {
    e.add("sim.X", fmt::format("must exceed h0 = {} (the initial interval has to lie inside the window), got {}",
                               sim.h0, sim.X));
  }
  if (sim.n_nodes < 2) e.add("sim.n_nodes", "must be at least 2");
  require_positive(e, "sim.t_end", sim.t_end, "simulation horizon");
  require_positive(e, "sim.sample_interval", sim.sample_interval, "sampling cadence");
  for (double t : sim.snapshot_times) {
    if (!(t >= 0.0)) e.add("sim.snapshot_times", "times must be nonnegative");
  }
  if (sim.S0.inf() <= 0.0) e.add("sim.S0", "must be positive everywhere (bounded positive initial susceptibles)");
  if (sim.L_star) require_positive(e, "sim.L_star", *sim.L_star, "critical halfwidth");

  // classify
  Obj tj = root.child("classify");
  ClassifyThresholds& th = sim.thresholds;
  th.eps_vanish = tj.number("eps_vanish", th.eps_vanish);
  th.eps_speed = tj.number("eps_speed", th.eps_speed);
  th.L_spread = tj.optional_number("L_spread");
  th.delta_persist = tj.number("delta_persist", th.delta_persist);
  th.trailing_window = tj.number("trailing_window", th.trailing_window);
  tj.finish();
  require_positive(e, "classify.eps_vanish", th.eps_vanish, "vanishing threshold");
  require_positive(e, "classify.eps_speed", th.eps_speed, "front speed threshold");
  require_positive(e, "classify.delta_persist", th.delta_persist, "persistence threshold");
  require_positive(e, "classify.trailing_window", th.trailing_window, "trailing window length");
  if (th.L_spread) require_positive(e, "classify.L_spread", *th.L_spread, "spread length");
  if (!(th.eps_vanish < th.delta_persist)) {
    e.add("classify.eps_vanish", "must be smaller than classify.delta_persist so the classes cannot overlap");
  }

  // eigen
  Obj ej = root.child("eigen");
  sim.eigen.tol = ej.number("tol", sim.eigen.tol);
  sim.eigen.max_iters = ej.count("max_iters", sim.eigen.max_iters);
  sim.eigen.power_steps = ej.count("power_steps", sim.eigen.power_steps);
  rc.eigen.L1 = ej.number("L1", rc.eigen.L1);
  rc.eigen.L2 = ej.number("L2", rc.eigen.L2);
  rc.eigen.n_nodes = ej.count("n_nodes", rc.eigen.n_nodes);
  ej.finish();
  require_positive(e, "eigen.tol", sim.eigen.tol, "residual tolerance");
  if (sim.eigen.max_iters == 0) e.add("eigen.max_iters", "must be at least 1");
  if (!(rc.eigen.L1 < rc.eigen.L2)) e.add("eigen.L2", "must exceed eigen.L1");
  if (rc.eigen.n_nodes == 0) e.add("eigen.n_nodes", "must be at least 1");

  // threshold
  Obj hj = root.child("threshold");
  ThresholdConfig& tc = rc.threshold;
  tc.k_lo = hj.number("k_lo", tc.k_lo);
  tc.k_hi = hj.number("k_hi", tc.k_hi);
  tc.refinements = hj.count("refinements", tc.refinements);
  tc.tol = hj.number("tol", tc.tol);
  tc.critical.L_min = hj.number("L_min", tc.critical.L_min);
  tc.critical.L_max = hj.number("L_max", tc.critical.L_max);
  tc.critical.d_max = hj.number("d_max", tc.critical.d_max);
  tc.critical.dx = hj.number("dx", tc.critical.dx);
  tc.critical.min_nodes = hj.count("min_nodes", tc.critical.min_nodes);
  hj.finish();
  tc.critical.eigen = sim.eigen;
  require_positive(e, "threshold.k_lo", tc.k_lo, "expansion capability");
  if (!(tc.k_hi > tc.k_lo)) e.add("threshold.k_hi", "must exceed threshold.k_lo");
  require_positive(e, "threshold.tol", tc.tol, "bisection tolerance");
  require_positive(e, "threshold.L_min", tc.critical.L_min, "smallest halfwidth");
  if (!(tc.critical.L_max > tc.critical.L_min)) e.add("threshold.L_max", "must exceed threshold.L_min");
  require_positive(e, "threshold.d_max", tc.critical.d_max, "largest diffusion rate");
  require_positive(e, "threshold.dx", tc.critical.dx, "grid spacing");

  // sweep
  Obj wj = root.child("sweep");
  rc.jobs = wj.count("jobs", rc.jobs);
  if (const json* axes = wj.get("axes")) {
    if (!axes->is_array() || axes->empty() || axes->size() > 2) {
      e.add("sweep.axes", "must be an array of one or two axes");
    } else {
      for (std::size_t i = 0; i < axes->size(); ++i) {
        Obj aj(&(*axes)[i], fmt::format("sweep.axes[{}]", i), e);
        AxisValues av;
        const std::string name = aj.string("name", "");
        av.values = aj.numbers("values", {});
        aj.finish();
        try {
          av.axis = parse_plan_axis(name);
        } catch (const std::exception& ex) {
          e.add(aj.at("name"), ex.what());
        }
        if (av.values.empty()) e.add(aj.at("values"), "must not be empty");
        sorted_distinct(e, aj.at("values"), av.values);
        rc.sweep_axes.push_back(std::move(av));
      }
      if (rc.sweep_axes.size() == 2 && rc.sweep_axes[0].axis == rc.sweep_axes[1].axis) {
        e.add("sweep.axes", "the two axes must differ");
      }
    }
  }
  wj.finish();
  if (rc.jobs == 0) e.add("sweep.jobs", "must be at least 1");

  // output
  Obj oj = root.child("output");
  rc.output.dir = oj.string("dir", rc.output.dir);
  rc.output.file = oj.string("file", rc.output.file);
  oj.finish();

  root.finish();

  if (kernel) sim.kernel = *kernel;
  if (model) sim.model = *model;
  if (e.list.empty()) {
    // Grid and initial-data checks that need the assembled configuration.
    try {
      Simulator check(sim);
    } catch (const SimulationError& ex) {
      e.add("sim", ex.what());
    } catch (const std::exception& ex) {
      e.add("sim", ex.what());
    }
  }
  rc.hash = fnv1a64(doc.dump());
  return rc;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte > 0 ? byte - 1 : 0, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& ex) {
    const auto [line, col] = line_column(text, ex.byte);
    throw ConfigError({fmt::format("syntax error at line {}, column {}: {}", line, col, ex.what())});
  }
  if (!doc.is_object()) throw ConfigError({"document must be a JSON object"});
  Errors e;
  RunConfig rc = build(doc, e);
  if (!e.list.empty()) throw ConfigError(std::move(e.list));
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError({"cannot read config file " + path.string()});
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace frontier_sis
