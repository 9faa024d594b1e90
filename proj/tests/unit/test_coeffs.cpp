#include <doctest.h>

#include <cmath>

#include "frontier_sis/coeffs.hpp"

using namespace frontier_sis;

namespace {

CoefficientParams base_params() {
  CoefficientParams p;
  p.beta0 = SpatialFunction::constant(2.0);
  p.gamma0 = SpatialFunction::constant(0.2);
  p.gamma1 = SpatialFunction::constant(1.0);
  p.beds = SpatialFunction::constant(3.0);
  return p;
}

}  // namespace

TEST_CASE("beta with both modifiers off") {
  CoefficientParams p = base_params();
  const CoefficientModel m(p);
  for (double I : {0.0, 0.5, 7.0}) CHECK(m.beta(0.3, I) == 2.0);
}

TEST_CASE("beta closed form") {
  CoefficientParams p = base_params();
  p.media = SpatialFunction::constant(0.5);
  p.beta_I_gain = 1.0;
  const CoefficientModel m(p);
  CHECK(m.beta(1.0, 1.0) == doctest::Approx(2.0 * std::exp(-0.5) * 1.5).epsilon(1e-15));
}

TEST_CASE("beta decreases with media and increases with I") {
  CoefficientParams p = base_params();
  p.beta_I_gain = 0.7;
  p.media = SpatialFunction(SpatialFunction::PiecewiseLinear{{{0.0, 0.0}, {1.0, 1.0}}});
  const CoefficientModel m(p);
  CHECK(m.beta(1.0, 0.4) < m.beta(0.0, 0.4));
  CHECK(m.beta(0.5, 0.1) < m.beta(0.5, 0.2));
  CHECK(m.beta(0.5, 1e9) <= 2.0 * 1.7);
}

TEST_CASE("gamma with a degenerate range") {
  CoefficientParams p = base_params();
  p.gamma0 = p.gamma1 = SpatialFunction::constant(0.5);
  const CoefficientModel m(p);
  for (double I : {0.0, 1.0, 40.0}) CHECK(m.gamma(0.0, I) == 0.5);
}

TEST_CASE("gamma closed form") {
  const CoefficientModel m(base_params());
  CHECK(m.gamma(0.0, 1.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.gamma(0.0, 0.0) == 1.0);
  CHECK(m.gamma(0.0, 2.0) < m.gamma(0.0, 1.0));
}

TEST_CASE("gamma with zero beds") {
  CoefficientParams p = base_params();
  p.beds = SpatialFunction::constant(0.0);
  const CoefficientModel m(p);
  CHECK(m.gamma(0.0, 0.0) == 1.0);
  CHECK(m.gamma(0.0, 1e-3) == 0.2);
}

TEST_CASE("negative infected density is rejected") {
  const CoefficientModel m(base_params());
  CHECK_THROWS_AS(m.beta(0.0, -1e-12), CoefficientError);
  CHECK_THROWS_AS(m.gamma(0.0, -1.0), CoefficientError);
  CHECK_THROWS_AS(m.with_media_scale(-1.0), CoefficientError);
}

TEST_CASE("invalid parameters are rejected") {
  CoefficientParams p = base_params();
  p.mu1 = 0.0;
  CHECK_THROWS_AS(CoefficientModel{p}, CoefficientError);
  p = base_params();
  p.gamma0 = SpatialFunction::constant(2.0);
  CHECK_THROWS_AS(CoefficientModel{p}, CoefficientError);
  p = base_params();
  p.media = SpatialFunction::constant(-0.1);
  CHECK_THROWS_AS(CoefficientModel{p}, CoefficientError);
}

TEST_CASE("a profile of a balanced example") {
  CoefficientParams p = base_params();
  p.mu2 = 0.5;
  p.gamma1 = SpatialFunction::constant(0.5);
  p.beta_I_gain = 3.0;
  const CoefficientModel m(p);
  const std::vector<double> x = {-4.0, 0.0, 2.5};
  for (double a : m.a_profile(x)) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("a vanishes when infection and removal balance") {
  CoefficientParams p = base_params();
  p.mu2 = 1.0;  // 2 - 1 - 1
  const CoefficientModel m(p);
  CHECK(std::abs(m.threshold(0.7)) < 1e-15);
}

TEST_CASE("more media lowers a pointwise") {
  CoefficientParams p = base_params();
  p.media = SpatialFunction(SpatialFunction::GaussianBump{0.0, 0.0, 1.0, 1.0});
  const CoefficientModel m(p);
  const CoefficientModel more = m.with_media_scale(2.0);
  for (double x = -3.0; x <= 3.0; x += 0.25) CHECK(more.threshold(x) <= m.threshold(x));
}

TEST_CASE("doubling beta0 raises a by the disease-free contact rate") {
  CoefficientParams p = base_params();
  const CoefficientModel m(p);
  p.beta0 = SpatialFunction::constant(4.0);
  const CoefficientModel m2(p);
  CHECK(m2.threshold(0.0) - m.threshold(0.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("derivative bounds") {
  CoefficientParams p = base_params();
  p.beta_I_gain = 0.5;
  const CoefficientModel m(p);
  CHECK(m.beta_I_derivative_bound() >= 2.0 * 0.5 - 1e-15);
  CHECK(m.gamma_I_derivative_bound() >= 0.8 / 3.0 - 1e-15);
  p.beds = SpatialFunction::constant(0.0);
  CHECK(std::isinf(CoefficientModel(p).gamma_I_derivative_bound()));
}
