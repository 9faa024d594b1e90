#include "frontier_sis/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "frontier_sis/io.hpp"

namespace frontier_sis {

std::string_view to_string(PlanAxis axis) {
  switch (axis) {
    case PlanAxis::D:
      return "d";
    case PlanAxis::K:
      return "k";
    case PlanAxis::H0:
      return "h0";
    case PlanAxis::MediaScale:
      return "media-scale";
    case PlanAxis::BedScale:
      return "bed-scale";
  }
  return "unknown";
}

PlanAxis parse_plan_axis(std::string_view name) {
  if (name == "d") return PlanAxis::D;
  if (name == "k") return PlanAxis::K;
  if (name == "h0") return PlanAxis::H0;
  if (name == "media-scale") return PlanAxis::MediaScale;
  if (name == "bed-scale") return PlanAxis::BedScale;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (expected d, k, h0, media-scale or bed-scale)");
}

bool PhaseRow::same_result(const PhaseRow& o) const {
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  if (axis_values.size() != o.axis_values.size()) return false;
  for (std::size_t i = 0; i < axis_values.size(); ++i) {
    if (!same(axis_values[i], o.axis_values[i])) return false;
  }
  return cls == o.cls && same(final_len, o.final_len) && same(final_max_I, o.final_max_I) &&
         same(lambda_p_final, o.lambda_p_final) && same(lambda_p_initial, o.lambda_p_initial) &&
         status == o.status;
}

bool PhaseTable::same_results(const PhaseTable& o) const {
  if (axes != o.axes || rows.size() != o.rows.size() || config_hash != o.config_hash) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].same_result(o.rows[i])) return false;
  }
  return true;
}

SimConfig apply_axis(const SimConfig& base, PlanAxis axis, double value) {
  SimConfig c = base;
  switch (axis) {
    case PlanAxis::D:
      c.d = value;
      break;
    case PlanAxis::K:
      c.k = value;
      break;
    case PlanAxis::H0:
      c.I0 = base.I0.dilated(value / base.h0);
      c.h0 = value;
      break;
    case PlanAxis::MediaScale:
      c.model = base.model.with_media_scale(value);
      break;
    case PlanAxis::BedScale:
      c.model = base.model.with_bed_scale(value);
      break;
  }
  return c;
}

namespace {

void check_axis(const AxisValues& a) {
  if (a.values.empty()) throw std::invalid_argument("sweep axis has no values");
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!std::isfinite(a.values[i])) throw std::invalid_argument("sweep axis values must be finite");
    if (i > 0 && !(a.values[i] > a.values[i - 1])) {
      throw std::invalid_argument("sweep axis values must be sorted and distinct");
    }
  }
}

double initial_lambda(const SimConfig& c) {
  const double dx = 2.0 * c.X / static_cast<double>(c.n_nodes);
  const auto n = std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(2.0 * c.h0 / dx)));
  return principal_eigenvalue(EigenProblem::from_model(c.kernel, c.model, c.d, -c.h0, c.h0, n), c.eigen).lambda_p;
}

void warn_on_d_axis(PhaseTable& table, const SweepPlan& plan) {
  for (std::size_t ax = 0; ax < plan.axes.size(); ++ax) {
    if (plan.axes[ax].axis != PlanAxis::D) continue;
    const std::size_t n_other = plan.axes.size() == 2 ? plan.axes[1 - ax].values.size() : 1;
    const std::size_t n_d = plan.axes[ax].values.size();
    for (std::size_t o = 0; o < n_other; ++o) {
      bool seen_vanishing = false;
      for (std::size_t i = 0; i < n_d; ++i) {
        std::size_t row;
        if (plan.axes.size() == 1) {
          row = i;
        } else {
          row = ax == 0 ? i * n_other + o : o * n_d + i;
        }
        const auto cls = table.rows[row].cls;
        if (cls == OutcomeClass::Vanishing) seen_vanishing = true;
        if (cls == OutcomeClass::Spreading && seen_vanishing) {
          const std::string msg = fmt::format(
              "phase boundary: Spreading at d = {} after a Vanishing row at smaller d", plan.axes[ax].values[i]);
          log().warn("{}", msg);
          table.warnings.push_back(msg);
          break;
        }
      }
    }
  }
}

}  // namespace

PhaseTable run_sweep(const SweepPlan& plan) {
  if (plan.axes.empty() || plan.axes.size() > 2) throw std::invalid_argument("a sweep plan needs one or two axes");
  for (const auto& a : plan.axes) check_axis(a);

  const std::size_t n1 = plan.axes[0].values.size();
  const std::size_t n2 = plan.axes.size() == 2 ? plan.axes[1].values.size() : 1;
  const std::size_t total = n1 * n2;

  PhaseTable table;
  for (const auto& a : plan.axes) table.axes.push_back(a.axis);
  table.config_hash = plan.config_hash;
  table.n_nodes = plan.base.n_nodes;
  table.dx = 2.0 * plan.base.X / static_cast<double>(plan.base.n_nodes);
  table.rows.resize(total);
  std::vector<double> dts(total, 0.0);

  auto run_row = [&](std::size_t idx) {
    PhaseRow& row = table.rows[idx];
    const std::size_t i1 = idx / n2;
    const std::size_t i2 = idx % n2;
    row.axis_values.push_back(plan.axes[0].values[i1]);
    if (plan.axes.size() == 2) row.axis_values.push_back(plan.axes[1].values[i2]);
    const auto start = std::chrono::steady_clock::now();
    try {
      SimConfig cfg = apply_axis(plan.base, plan.axes[0].axis, plan.axes[0].values[i1]);
      if (plan.axes.size() == 2) cfg = apply_axis(cfg, plan.axes[1].axis, plan.axes[1].values[i2]);
      const SimResult res = simulate(cfg);
      row.cls = res.outcome.cls;
      row.final_len = res.outcome.final_interval_length;
      row.final_max_I = res.outcome.final_max_I;
      row.lambda_p_final = res.outcome.lambda_p_at_final_interval;
      row.lambda_p_initial = initial_lambda(cfg);
      dts[idx] = res.dt;
      if (res.audit.violation) row.status = "spectral-audit-violation";
    } catch (const std::exception& e) {
      row.cls = OutcomeClass::Undecided;
      row.final_len = row.final_max_I = row.lambda_p_final = row.lambda_p_initial = std::nan("");
      row.status = std::string("error: ") + e.what();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) run_row(i);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(plan.jobs, total));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  table.dt = dts.front();
  for (double dt : dts) {
    if (dt != table.dt) table.dt = 0.0;
  }
  warn_on_d_axis(table, plan);
  return table;
}

std::string phase_table_csv(const PhaseTable& table) {
  std::string out;
  for (std::size_t a = 0; a < table.axes.size(); ++a) {
    out += fmt::format("axis{0}_name,axis{0}_value,", a + 1);
  }
  out += "class,final_len,final_max_I,lambda_p_final,runtime_s,status\n";
  for (const auto& row : table.rows) {
    for (std::size_t a = 0; a < table.axes.size(); ++a) {
      out += fmt::format("{},{:.17g},", to_string(table.axes[a]), row.axis_values[a]);
    }
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.6f},{}\n", to_string(row.cls), row.final_len,
                       row.final_max_I, row.lambda_p_final, row.runtime_s, status);
  }
  return out;
}

KBracket bracket_k_threshold(const KClassifier& classify_k, double k_lo, double k_hi, std::size_t refinements) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw BracketError("bracket invalid: need 0 < k_lo < k_hi");
  KBracket out;
  auto probe = [&](double k) {
    const OutcomeClass c = classify_k(k);
    out.probes.push_back(KProbe{k, c});
    log().info("k = {:.6g}: {}", k, to_string(c));
    return c;
  };
  if (probe(k_lo) != OutcomeClass::Vanishing) throw BracketError("bracket invalid: k_lo is not classified Vanishing");
  if (probe(k_hi) != OutcomeClass::Spreading) throw BracketError("bracket invalid: k_hi is not classified Spreading");

  double lo = k_lo, hi = k_hi;
  bool has_band = false;
  double band_lo = 0.0, band_hi = 0.0;
  std::size_t undecided = 0;
  for (std::size_t r = 0; r < refinements; ++r) {
    double mid;
    if (!has_band) {
      mid = 0.5 * (lo + hi);
    } else if (band_lo - lo >= hi - band_hi) {
      mid = 0.5 * (lo + band_lo);
    } else {
      mid = 0.5 * (band_hi + hi);
    }
    const OutcomeClass c = probe(mid);
    if (c == OutcomeClass::Undecided) {
      ++undecided;
      band_lo = has_band ? std::min(band_lo, mid) : mid;
      band_hi = has_band ? std::max(band_hi, mid) : mid;
      has_band = true;
    } else if (c == OutcomeClass::Vanishing) {
      lo = mid;
      if (has_band && mid > band_lo) {
        // Vanishing above part of the undecided band: drop what lies below.
        band_lo = std::max(band_lo, mid);
        if (band_lo > band_hi) has_band = false;
      }
    } else {
      hi = mid;
      if (has_band && mid < band_hi) {
        band_hi = std::min(band_hi, mid);
        if (band_lo > band_hi) has_band = false;
      }
    }
  }
  if (refinements > 0 && undecided == refinements) {
    throw BracketError("budget exhausted: every refinement probe was Undecided");
  }
  out.k_lower_bound = lo;
  out.k_upper_bound = hi;
  return out;
}

KBracket bracket_k_threshold(const SimConfig& base, double k_lo, double k_hi, std::size_t refinements) {
  return bracket_k_threshold(
      [&base](double k) { return simulate(apply_axis(base, PlanAxis::K, k)).outcome.cls; }, k_lo, k_hi,
      refinements);
}

}  // namespace frontier_sis
