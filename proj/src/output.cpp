#include "frontier_sis/output.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include "frontier_sis/io.hpp"

namespace frontier_sis {

std::string series_csv(const Trajectory& tr) {
  std::string out = "t,g,h,max_I,total_I";
  for (std::size_t p = 0; p < tr.probe_x.size(); ++p) out += fmt::format(",S_probe_{}", p + 1);
  out += "\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", tr.t[i], tr.g[i], tr.h[i], tr.max_I[i], tr.total_I[i]);
    for (double s : tr.S_probe[i]) out += fmt::format(",{:.17g}", s);
    out += "\n";
  }
  return out;
}

std::string snapshot_csv(const Snapshot& s) {
  std::string out = "x,S,I\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) out += fmt::format("{:.17g},{:.17g},{:.17g}\n", s.x[i], s.S[i], s.I[i]);
  return out;
}

std::string snapshot_filename(const Snapshot& s) { return fmt::format("snapshot_{:g}.csv", s.t); }

std::string outcome_json(const SimResult& r, std::size_t n_nodes, std::uint64_t config_hash) {
  const Outcome& o = r.outcome;
  const nlohmann::json j{{"class", std::string(to_string(o.cls))},
                         {"final_interval_length", o.final_interval_length},
                         {"final_g", o.final_g},
                         {"final_h", o.final_h},
                         {"final_max_I", o.final_max_I},
                         {"lambda_p_final", o.lambda_p_at_final_interval},
                         {"horizon", o.horizon},
                         {"front_speed", o.front_speed},
                         {"trailing_min_max_I", o.trailing_min_max_I},
                         {"L_spread", o.L_spread},
                         {"audit",
                          {{"applicable", r.audit.applicable},
                           {"lambda_p", r.audit.lambda_p},
                           {"tol", r.audit.tol},
                           {"violation", r.audit.violation}}},
                         {"dt", r.dt},
                         {"steps", r.steps},
                         {"bound_A", r.bound_A},
                         {"n_nodes", n_nodes},
                         {"config_hash", hex64(config_hash)}};
  return j.dump(2) + "\n";
}

}  // namespace frontier_sis
