// frontier_sis command line: eigen, simulate, sweep, threshold finders, verify.
//
// Exit codes: 0 success, 1 numeric failure, 2 config or usage error.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "frontier_sis/config.hpp"
#include "frontier_sis/io.hpp"
#include "frontier_sis/output.hpp"
#include "frontier_sis/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace frontier_sis;

namespace {

constexpr int kOk = 0;
constexpr int kNumeric = 1;
constexpr int kConfig = 2;

struct Globals {
  std::string config;
  std::string out;
  std::string out_dir;
  std::size_t jobs = 0;  // 0: from config
  bool seedless = false;
};

RunConfig load(const Globals& g) { return g.config.empty() ? parse_config("{}") : load_config(g.config); }

void emit(const Globals& g, const std::string& content, const std::string& fallback_file = {}) {
  const std::string target = !g.out.empty() ? g.out : fallback_file;
  if (target.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  const fs::path p(target);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file_atomic(p, content);
  log().info("wrote {}", p.string());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "' in --values");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--values is empty");
  return out;
}

// ---- eigen ----

struct EigenArgs {
  std::optional<double> d, L1, L2, tol;
  std::optional<std::size_t> n;
  std::string axis;
  std::string values;
};

int run_eigen(const Globals& g, const EigenArgs& a) {
  const RunConfig rc = load(g);
  EigenSweepBase base{rc.sim.kernel, rc.sim.model, a.d.value_or(rc.sim.d), a.L1.value_or(rc.eigen.L1),
                      a.L2.value_or(rc.eigen.L2), a.n.value_or(rc.eigen.n_nodes)};
  EigenOptions eo = rc.sim.eigen;
  if (a.tol) eo.tol = *a.tol;
  std::string csv = "value,lambda_p,residual,iterations,constant_profile,degenerate\n";
  auto row = [&](double value, const EigenResult& r) {
    csv += fmt::format("{:.17g},{:.17g},{:.6e},{},{},{}\n", value, r.lambda_p, r.residual, r.iterations,
                       r.constant_profile ? 1 : 0, r.degenerate ? 1 : 0);
    if (r.constant_profile) log().warn("a(x) is constant on the grid; its maximum is attained everywhere");
  };
  if (a.axis.empty()) {
    const auto pr = EigenProblem::from_model(base.kernel, base.model, base.d, base.L1, base.L2, base.n_nodes);
    row(base.d, principal_eigenvalue(pr, eo));
  } else {
    const SweepAxis axis = parse_sweep_axis(a.axis);
    const auto values = parse_list(a.values);
    const auto table = eigen_sweep(base, axis, values, eo, g.jobs ? g.jobs : rc.jobs);
    for (const auto& r : table.rows) row(r.value, r.result);
    if (!table.monotone_ok) {
      log().error("monotonicity violated along {}: max violation {:.3e}", to_string(axis), table.max_violation);
      emit(g, csv);
      return kNumeric;
    }
  }
  emit(g, csv);
  return kOk;
}

// ---- simulate ----

int run_simulate(const Globals& g) {
  const RunConfig rc = load(g);
  const fs::path dir(g.out_dir.empty() ? rc.output.dir : g.out_dir);
  const SimResult r = simulate(rc.sim);
  fs::create_directories(dir);
  write_file_atomic(dir / "series.csv", series_csv(r.trajectory));
  for (const auto& s : r.trajectory.snapshots) write_file_atomic(dir / snapshot_filename(s), snapshot_csv(s));
  const std::string outcome = outcome_json(r, rc.sim.n_nodes, rc.hash);
  write_file_atomic(dir / "outcome.json", outcome);
  std::fwrite(outcome.data(), 1, outcome.size(), stdout);
  if (r.audit.violation) {
    log().error("spectral audit failed: lambda_p on the final interval is {:.3e} > 10 tol", r.audit.lambda_p);
    return kNumeric;
  }
  return kOk;
}

// ---- sweep ----

int run_sweep_cmd(const Globals& g) {
  const RunConfig rc = load(g);
  if (rc.sweep_axes.empty()) throw ConfigError({"sweep.axes: required for the sweep subcommand"});
  SweepPlan plan{rc.sim, rc.sweep_axes, g.jobs ? g.jobs : rc.jobs, rc.hash};
  const PhaseTable t = run_sweep(plan);
  emit(g, phase_table_csv(t), rc.output.file);
  json meta{{"config_hash", hex64(t.config_hash)}, {"n_nodes", t.n_nodes}, {"dx", t.dx}, {"dt", t.dt},
            {"warnings", t.warnings}};
  const std::string target = !g.out.empty() ? g.out : rc.output.file;
  if (target.empty()) {
    log().info("sweep metadata: {}", meta.dump());
  } else {
    write_file_atomic(fs::path(target + ".meta.json"), meta.dump(2) + "\n");
  }
  std::size_t failed = 0;
  for (const auto& row : t.rows) failed += row.status == "ok" ? 0 : 1;
  if (failed) log().warn("{} of {} rows did not finish cleanly", failed, t.rows.size());
  return kOk;
}

// ---- thresholds ----

struct KArgs {
  std::optional<double> k_lo, k_hi;
  std::optional<std::size_t> refinements;
};

int run_threshold_k(const Globals& g, const KArgs& a) {
  const RunConfig rc = load(g);
  const KBracket b = bracket_k_threshold(rc.sim, a.k_lo.value_or(rc.threshold.k_lo), a.k_hi.value_or(rc.threshold.k_hi),
                                         a.refinements.value_or(rc.threshold.refinements));
  json probes = json::array();
  for (const auto& p : b.probes) probes.push_back({{"k", p.k}, {"class", std::string(to_string(p.cls))}});
  const json out{{"k_lower_bound", b.k_lower_bound},
                 {"k_upper_bound", b.k_upper_bound},
                 {"probes", probes},
                 {"config_hash", hex64(rc.hash)}};
  emit(g, out.dump(2) + "\n");
  return kOk;
}

int run_threshold_L(const Globals& g, std::optional<double> tol) {
  const RunConfig rc = load(g);
  const auto r = critical_length(rc.sim.model, rc.sim.kernel, rc.sim.d, tol.value_or(rc.threshold.tol), rc.threshold.critical);
  const json out{{"L_star", r.L_star},         {"bracket_lo", r.bracket_lo}, {"bracket_hi", r.bracket_hi},
                 {"lambda_lo", r.lambda_lo},   {"lambda_hi", r.lambda_hi},   {"evaluations", r.evaluations},
                 {"config_hash", hex64(rc.hash)}};
  emit(g, out.dump(2) + "\n");
  return kOk;
}

int run_threshold_d(const Globals& g, std::optional<double> tol) {
  const RunConfig rc = load(g);
  const auto r =
      critical_diffusion(rc.sim.model, rc.sim.kernel, rc.sim.h0, tol.value_or(rc.threshold.tol), rc.threshold.critical);
  const json out{{"d_star", r.d_star},
                 {"bracket_lo", r.bracket_lo},
                 {"bracket_hi", r.bracket_hi},
                 {"tail_mass", r.tail_mass},
                 {"max_a", r.max_a},
                 {"vanishing_for_all_d", r.vanishing_for_all_d},
                 {"evaluations", r.evaluations},
                 {"config_hash", hex64(rc.hash)}};
  emit(g, out.dump(2) + "\n");
  return kOk;
}

// ---- verify ----

int run_verify_cmd(const Globals& g, const std::string& level, double mass_factor) {
  VerifyOptions o;
  if (level == "fast") {
    o.level = VerifyLevel::Fast;
  } else if (level == "full") {
    o.level = VerifyLevel::Full;
  } else {
    throw ConfigError({"--level must be fast or full"});
  }
  o.kernel_mass_factor = mass_factor;
  const VerifyReport r = run_verify(o);
  emit(g, r.text());
  return r.all_pass() ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal SIS free-boundary model: simulation, principal eigenvalue and thresholds"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config,--plan", g.config, "JSON run config");
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--out-dir", g.out_dir, "output directory for simulate");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--seedless", g.seedless, "assert that no random number generator is used (always true)");

  EigenArgs ea;
  auto* eigen = app.add_subcommand("eigen", "principal eigenvalue, optionally swept along one axis");
  eigen->add_option("--d", ea.d, "diffusion rate");
  eigen->add_option("--L1", ea.L1, "left end of the interval");
  eigen->add_option("--L2", ea.L2, "right end of the interval");
  eigen->add_option("--n", ea.n, "grid nodes");
  eigen->add_option("--tol", ea.tol, "residual tolerance");
  eigen->add_option("--axis", ea.axis, "d, interval-halfwidth, media-scale or bed-scale");
  eigen->add_option("--values", ea.values, "comma separated ascending values");

  auto* sim = app.add_subcommand("simulate", "time-step one configuration");
  auto* sweep = app.add_subcommand("sweep", "phase table over one or two axes");

  KArgs ka;
  auto* tk = app.add_subcommand("threshold-k", "bracket the expansion-capability threshold");
  tk->add_option("--k-lo", ka.k_lo);
  tk->add_option("--k-hi", ka.k_hi);
  tk->add_option("--refinements", ka.refinements);

  std::optional<double> tol_L, tol_d;
  auto* tL = app.add_subcommand("threshold-L", "critical halfwidth L*");
  tL->add_option("--tol", tol_L);
  auto* td = app.add_subcommand("threshold-d", "critical diffusion rate d*");
  td->add_option("--tol", tol_d);

  std::string level = "fast";
  double mass_factor = 1.0;
  auto* ver = app.add_subcommand("verify", "property suite");
  ver->add_option("--level", level, "fast or full");
  ver->add_option("--kernel-mass-factor", mass_factor, "test hook: scale every kernel's mass")->group("");

  for (auto* sub : {eigen, sim, sweep, tk, tL, td, ver}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (g.seedless) log().debug("seedless: no random number generator is linked or called");

  try {
    if (*eigen) return run_eigen(g, ea);
    if (*sim) return run_simulate(g);
    if (*sweep) return run_sweep_cmd(g);
    if (*tk) return run_threshold_k(g, ka);
    if (*tL) return run_threshold_L(g, tol_L);
    if (*td) return run_threshold_d(g, tol_d);
    if (*ver) return run_verify_cmd(g, level, mass_factor);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const SimulationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == SimulationError::Kind::Config ? kConfig : kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kConfig;
}
