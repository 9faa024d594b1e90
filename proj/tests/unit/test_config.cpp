#include <doctest.h>

#include <string>

#include "frontier_sis/config.hpp"

using namespace frontier_sis;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("empty document gives the defaults") {
  const RunConfig rc = parse_config("{}");
  CHECK(rc.sim.kernel.family() == KernelFamily::TruncatedGaussian);
  CHECK(rc.sim.kernel.width() == 0.5);
  CHECK(rc.sim.thresholds.eps_vanish == 1e-6);
  CHECK(rc.sim.thresholds.eps_speed == 1e-8);
  CHECK(rc.sim.thresholds.delta_persist == 1e-4);
  CHECK_FALSE(rc.sim.thresholds.L_spread.has_value());
  CHECK(rc.sim.dt == 0.0);
  CHECK(rc.jobs == 1);
}

TEST_CASE("hash ignores key order and whitespace") {
  const RunConfig a = parse_config(R"({"sim": {"d": 2, "k": 3}})");
  const RunConfig b = parse_config("{ \"sim\" : { \"k\" : 3 ,\n \"d\" : 2 } }");
  CHECK(a.hash == b.hash);
  CHECK(a.hash != parse_config("{}").hash);
}

TEST_CASE("nonpositive mu1 is reported") {
  const auto e = errors_of(R"({"coeffs": {"mu1": 0}})");
  REQUIRE_FALSE(e.empty());
  CHECK(mentions(e, "coeffs.mu1"));
  CHECK(mentions(e, "must be positive"));
}

TEST_CASE("initial interval outside the window is reported") {
  const auto e = errors_of(R"({"sim": {"h0": 5, "X": 4}})");
  CHECK(mentions(e, "sim.X"));
}

TEST_CASE("unknown keys are reported with their path") {
  CHECK(mentions(errors_of(R"({"sim": {"dd": 1}})"), "sim.dd"));
  CHECK(mentions(errors_of(R"({"kernels": {}})"), "kernels"));
}

TEST_CASE("syntax errors carry a line number") {
  const auto e = errors_of("{\n  \"sim\": {\n    \"d\": 1,\n  }\n}");
  REQUIRE(e.size() == 1);
  CHECK(mentions(e, "line 4"));
}

TEST_CASE("every problem is listed") {
  const auto e = errors_of(R"({"coeffs": {"mu1": -1, "sigma": 0}, "sim": {"d": "fast", "k": -2}})");
  CHECK(e.size() >= 4);
  CHECK(mentions(e, "coeffs.mu1"));
  CHECK(mentions(e, "coeffs.sigma"));
  CHECK(mentions(e, "sim.d"));
  CHECK(mentions(e, "sim.k"));
}

TEST_CASE("spatial fields") {
  const RunConfig rc = parse_config(R"({
    "coeffs": {"media": {"kind": "gaussian-bump", "amplitude": 0.5, "width": 2},
               "beds": {"kind": "piecewise-linear", "knots": [[-1, 0.5], [1, 2]]}},
    "sim": {"I0": {"kind": "tent", "amplitude": 0.2}}})");
  const auto& p = rc.sim.model.params();
  CHECK(p.media(0.0) == doctest::Approx(0.5));
  CHECK(p.beds(0.0) == doctest::Approx(1.25));
  CHECK(rc.sim.I0(0.0) == doctest::Approx(0.2));
  CHECK(rc.sim.I0(rc.sim.h0) == 0.0);

  CHECK(mentions(errors_of(R"({"coeffs": {"beds": {"kind": "spline"}}})"), "coeffs.beds.kind"));
  CHECK(mentions(errors_of(R"({"coeffs": {"beds": {"kind": "piecewise-linear", "knots": [[1, 0], [0, 1]]}}})"),
                 "increasing"));
  CHECK_FALSE(errors_of(R"({"coeffs": {"media": {"kind": "gaussian-bump", "width": -1}}})").empty());
}

TEST_CASE("sweep axes") {
  const RunConfig rc = parse_config(R"({"sweep": {"axes": [{"name": "d", "values": [0.5, 1, 2]}], "jobs": 4}})");
  REQUIRE(rc.sweep_axes.size() == 1);
  CHECK(rc.sweep_axes[0].axis == PlanAxis::D);
  CHECK(rc.jobs == 4);
  CHECK(mentions(errors_of(R"({"sweep": {"axes": [{"name": "d", "values": [2, 1]}]}})"), "sorted"));
  CHECK_FALSE(errors_of(R"({"sweep": {"axes": [{"name": "sigma", "values": [1]}]}})").empty());
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/run.json"), ConfigError);
}
