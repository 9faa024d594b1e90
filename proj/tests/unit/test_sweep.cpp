#include <doctest.h>

#include <cmath>

#include "frontier_sis/sweep.hpp"

using namespace frontier_sis;

namespace {

KClassifier threshold_at(double k_star) {
  return [k_star](double k) { return k < k_star ? OutcomeClass::Vanishing : OutcomeClass::Spreading; };
}

SimConfig quick_config() {
  SimConfig c;
  c.X = 8.0;
  c.n_nodes = 160;
  c.t_end = 5.0;
  c.early_exit = false;
  return c;
}

}  // namespace

TEST_CASE("bisection halves the bracket per refinement") {
  for (std::size_t r : {0u, 1u, 6u, 12u}) {
    const KBracket b = bracket_k_threshold(threshold_at(0.3719), 0.1, 1.1, r);
    CHECK(b.k_upper_bound - b.k_lower_bound == doctest::Approx(1.0 / std::ldexp(1.0, static_cast<int>(r))));
    CHECK(b.k_lower_bound < 0.3719);
    CHECK(b.k_upper_bound >= 0.3719);
    CHECK(b.probes.size() == r + 2);
  }
}

TEST_CASE("invalid brackets") {
  CHECK_THROWS_AS(bracket_k_threshold(threshold_at(0.05), 0.1, 1.0, 4), BracketError);
  CHECK_THROWS_AS(bracket_k_threshold(threshold_at(2.0), 0.1, 1.0, 4), BracketError);
  CHECK_THROWS_AS(bracket_k_threshold(threshold_at(0.5), 1.0, 0.1, 4), BracketError);
  CHECK_THROWS_AS(bracket_k_threshold(threshold_at(0.5), 0.0, 1.0, 4), BracketError);
}

TEST_CASE("all undecided probes exhaust the budget") {
  const KClassifier c = [](double k) {
    if (k <= 0.1) return OutcomeClass::Vanishing;
    if (k >= 1.0) return OutcomeClass::Spreading;
    return OutcomeClass::Undecided;
  };
  CHECK_THROWS_AS(bracket_k_threshold(c, 0.1, 1.0, 5), BracketError);
}

TEST_CASE("an undecided band stays inside the bracket") {
  const KClassifier c = [](double k) {
    if (k < 0.4) return OutcomeClass::Vanishing;
    if (k > 0.6) return OutcomeClass::Spreading;
    return OutcomeClass::Undecided;
  };
  const KBracket b = bracket_k_threshold(c, 0.1, 1.0, 10);
  CHECK(b.k_lower_bound < 0.4);
  CHECK(b.k_upper_bound > 0.6);
  CHECK(c(b.k_lower_bound) == OutcomeClass::Vanishing);
  CHECK(c(b.k_upper_bound) == OutcomeClass::Spreading);
}

TEST_CASE("axis parsing") {
  CHECK(parse_plan_axis("media-scale") == PlanAxis::MediaScale);
  CHECK(to_string(PlanAxis::H0) == "h0");
  CHECK_THROWS(parse_plan_axis("sigma"));
}

TEST_CASE("h0 axis dilates the initial infection") {
  const SimConfig base = quick_config();
  const SimConfig c = apply_axis(base, PlanAxis::H0, 2.0);
  CHECK(c.h0 == 2.0);
  CHECK(c.I0(-2.0) == 0.0);
  CHECK(c.I0(2.0) == 0.0);
  CHECK(c.I0(1.0) == doctest::Approx(base.I0(0.5)));
  CHECK(apply_axis(base, PlanAxis::K, 3.0).k == 3.0);
}

TEST_CASE("phase table is independent of the worker count") {
  SweepPlan plan{quick_config(), {{PlanAxis::D, {0.5, 1.0}}, {PlanAxis::K, {0.5, 2.0}}}, 1, 42};
  const PhaseTable a = run_sweep(plan);
  plan.jobs = 3;
  const PhaseTable b = run_sweep(plan);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.same_results(b));
  CHECK(a.rows[1].axis_values == std::vector<double>{0.5, 2.0});
  CHECK(a.config_hash == 42);

  const std::string csv = phase_table_csv(a);
  CHECK(csv.rfind("axis1_name,axis1_value,axis2_name,axis2_value,class,final_len,final_max_I,lambda_p_final,"
                  "runtime_s,status\n",
                  0) == 0);
}

TEST_CASE("a failing row does not stop the sweep") {
  SweepPlan plan{quick_config(), {{PlanAxis::D, {-1.0, 1.0}}}, 2, 0};
  const PhaseTable t = run_sweep(plan);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].status.rfind("error: ", 0) == 0);
  CHECK(t.rows[1].status == "ok");
}

TEST_CASE("invalid plans") {
  CHECK_THROWS_AS(run_sweep(SweepPlan{quick_config(), {}, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(SweepPlan{quick_config(), {{PlanAxis::K, {2.0, 1.0}}}, 1, 0}), std::invalid_argument);
}
