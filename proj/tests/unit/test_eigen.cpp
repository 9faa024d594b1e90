#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "frontier_sis/eigen.hpp"

using namespace frontier_sis;

namespace {

const Kernel kGauss = Kernel::make(KernelFamily::TruncatedGaussian, 0.5);

// a == beta0 - 1 with the default rates.
CoefficientModel constant_a(double a) {
  CoefficientParams p;
  p.beta0 = SpatialFunction::constant(a + 1.0);
  return CoefficientModel(p);
}

double dense_oracle(const EigenProblem& pr) {
  const DenseMatrix A = assemble(pr);
  Eigen::MatrixXd M(A.n, A.n);
  for (std::size_t i = 0; i < A.n; ++i)
    for (std::size_t j = 0; j < A.n; ++j) M(i, j) = A(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("zero diffusion gives the maximum of a") {
  const auto pr = EigenProblem::from_function(kGauss, 0.0, -1.0, 1.0, 201, [](double x) { return 1.0 - x * x; });
  const EigenResult r = principal_eigenvalue(pr, {1e-10});
  CHECK(std::abs(r.lambda_p - 1.0) <= 1e-10);
  CHECK(r.degenerate);
  const DenseMatrix A = assemble(pr);
  CHECK(A(3, 4) == 0.0);
  CHECK(A(100, 100) == pr.a[100]);
}

TEST_CASE("one node") {
  const auto pr = EigenProblem::from_function(kGauss, 0.7, 0.0, 0.2, 1, [](double) { return 0.3; });
  const double expected = 0.7 * kGauss(0.0) * 0.2 - 0.7 + 0.3;
  CHECK(assemble(pr)(0, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(principal_eigenvalue(pr).lambda_p == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two nodes against the characteristic quadratic") {
  for (auto [a1, a2] : {std::pair{0.3, -0.4}, std::pair{1.0, 1.0}, std::pair{-2.0, 0.5}}) {
    const double d = 1.3, dx = 0.2;
    auto pr = EigenProblem::from_function(kGauss, d, 0.0, 0.4, 2, [](double) { return 0.0; });
    pr.a = {a1, a2};
    const double p = d * kGauss(0.0) * dx - d + a1;
    const double q = d * kGauss(0.0) * dx - d + a2;
    const double r = d * kGauss(dx) * dx;
    const double root = 0.5 * (p + q) + std::sqrt(0.25 * (p - q) * (p - q) + r * r);
    CHECK(std::abs(principal_eigenvalue(pr, {1e-13}).lambda_p - root) <= 1e-12);
    CHECK(assemble(pr)(0, 1) == assemble(pr)(1, 0));
  }
}

TEST_CASE("agrees with a dense symmetric eigensolver") {
  const std::function<double(double)> profiles[] = {
      [](double x) { return 0.5 - 0.2 * x * x; },
      [](double x) { return std::sin(3.0 * x); },
      [](double x) { return x > 0.0 ? 0.8 : -0.3; },
  };
  for (const auto& a : profiles) {
    for (double d : {0.1, 1.0, 5.0}) {
      for (auto fam : {KernelFamily::TruncatedGaussian, KernelFamily::BumpMollifier, KernelFamily::ExponentialLaplace}) {
        const auto pr = EigenProblem::from_function(Kernel::make(fam, 0.6), d, -1.5, 2.0, 120, a);
        const EigenResult r = principal_eigenvalue(pr, {1e-11});
        CHECK(std::abs(r.lambda_p - dense_oracle(pr)) <= 1e-10);
        for (double v : r.phi) CHECK(v > 0.0);
        CHECK(r.lower_bound <= r.lambda_p + 1e-12);
        CHECK(r.upper_bound >= r.lambda_p - 1e-12);
      }
    }
  }
}

TEST_CASE("small interval approaches a(0) - d") {
  const double h = 1e-3;
  const auto pr = EigenProblem::from_function(kGauss, 1.0, -h, h, 8, [](double) { return 0.3; });
  const double lam = principal_eigenvalue(pr).lambda_p;
  CHECK(std::abs(lam - (0.3 - 1.0)) <= 2.0 * kGauss.sup_norm() * h);
}

TEST_CASE("large interval approaches the supremum of a") {
  const auto pr = EigenProblem::from_model(kGauss, constant_a(0.5), 1.0, -50.0, 50.0, 1000);
  const EigenResult r = principal_eigenvalue(pr);
  CHECK(std::abs(r.lambda_p - 0.5) <= 0.01);
  CHECK(r.constant_profile);
}

TEST_CASE("upper bound by the maximum of a") {
  const auto pr = EigenProblem::from_function(kGauss, 2.0, -3.0, 1.0, 150, [](double x) { return std::cos(x); });
  CHECK(principal_eigenvalue(pr).lambda_p <= 1.0 + 1e-10);
}

TEST_CASE("invalid problems are rejected") {
  auto flat = [](double) { return 0.0; };
  CHECK_THROWS_AS(EigenProblem::from_function(kGauss, 1.0, 1.0, 1.0, 10, flat), std::invalid_argument);
  CHECK_THROWS_AS(principal_eigenvalue(EigenProblem::from_function(kGauss, -1.0, 0.0, 1.0, 10, flat)),
                  EigenProblemError);
  // Spacing beyond the bump support: neighbouring nodes do not interact.
  const Kernel bump = Kernel::make(KernelFamily::BumpMollifier, 0.1);
  CHECK_THROWS_AS(principal_eigenvalue(EigenProblem::from_function(bump, 1.0, 0.0, 10.0, 10, flat)),
                  EigenProblemError);
  CHECK_THROWS_AS(principal_eigenvalue(EigenProblem::from_function(kGauss, 1.0, 0.0, 1.0, 10, flat), {0.0}),
                  EigenProblemError);
}

TEST_CASE("budget exhaustion is reported") {
  const auto pr = EigenProblem::from_function(kGauss, 1.0, -5.0, 5.0, 200, [](double x) { return std::sin(x); });
  EigenOptions o{1e-15, 3, 2};
  CHECK_THROWS_AS(principal_eigenvalue(pr, o), EigenSolverError);
}

TEST_CASE("monotone sweeps") {
  CoefficientParams p;
  p.media = SpatialFunction::constant(1.0);
  p.beta0 = SpatialFunction(SpatialFunction::GaussianBump{1.5, 0.0, 1.0, 1.0});
  const EigenSweepBase base{kGauss, CoefficientModel(p), 1.0, -1.0, 1.0, 80};

  const std::vector<double> ds = {0.5, 1.0, 2.0};
  const auto td = eigen_sweep(base, SweepAxis::Diffusion, ds);
  CHECK(td.monotone_ok);
  CHECK(td.strict);
  CHECK(td.rows[0].result.lambda_p > td.rows[2].result.lambda_p);

  const std::vector<double> hw = {1.0, 2.0, 4.0};
  const auto th = eigen_sweep(base, SweepAxis::IntervalHalfwidth, hw);
  CHECK(th.monotone_ok);
  CHECK(th.rows[0].result.lambda_p <= th.rows[2].result.lambda_p);

  const std::vector<double> ms = {0.0, 1.0, 2.0};
  const auto tm = eigen_sweep(base, SweepAxis::MediaScale, ms, {}, 3);
  CHECK(tm.monotone_ok);
  CHECK(tm.rows[0].result.lambda_p >= tm.rows[2].result.lambda_p);

  const std::vector<double> unsorted = {2.0, 1.0};
  CHECK_THROWS(eigen_sweep(base, SweepAxis::Diffusion, unsorted));
}

TEST_CASE("critical length for 0 < a < d") {
  const auto r = critical_length(constant_a(0.5), kGauss, 1.0, 1e-6);
  CHECK(r.lambda_lo < 0.0);
  CHECK(r.lambda_hi > 0.0);
  CHECK(r.bracket_hi - r.bracket_lo <= 1e-6);
  CHECK(lambda_on_halfwidth(constant_a(0.5), kGauss, 1.0, r.L_star - 2e-6) < 0.0);
  CHECK(lambda_on_halfwidth(constant_a(0.5), kGauss, 1.0, r.L_star + 2e-6) > 0.0);
  CHECK(lambda_on_halfwidth(constant_a(0.5), kGauss, 1.0, 1e-3) == doctest::Approx(-0.5).epsilon(0.01));
}

TEST_CASE("critical length failure modes") {
  try {
    critical_length(constant_a(1.2), kGauss, 1.0, 1e-6);
    FAIL("expected a failure");
  } catch (const CriticalValueError& e) {
    CHECK(e.kind() == CriticalValueError::Kind::AlwaysPositive);
  }
  try {
    critical_length(constant_a(-0.1), kGauss, 1.0, 1e-6);
    FAIL("expected a failure");
  } catch (const CriticalValueError& e) {
    CHECK(e.kind() == CriticalValueError::Kind::AlwaysNegative);
  }
  CHECK_THROWS_AS(critical_length(constant_a(0.5), kGauss, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("critical diffusion") {
  const Kernel wide = Kernel::make(KernelFamily::TruncatedGaussian, 2.0);
  const auto r = critical_diffusion(constant_a(1.0), wide, 0.25, 1e-6);
  CHECK(r.d_star > 0.0);
  CHECK(r.tail_mass > 0.0);
  CHECK(lambda_on_halfwidth(constant_a(1.0), wide, r.d_star / 2.0, 0.25) > 0.0);
  CHECK(lambda_on_halfwidth(constant_a(1.0), wide, 2.0 * r.d_star, 0.25) < 0.0);

  const auto none = critical_diffusion(constant_a(-0.2), wide, 0.25, 1e-6);
  CHECK(none.d_star == 0.0);
  CHECK(none.vanishing_for_all_d);

  try {
    critical_diffusion(constant_a(1.0), Kernel::make(KernelFamily::BumpMollifier, 1.0), 1.0, 1e-6);
    FAIL("expected a failure");
  } catch (const CriticalValueError& e) {
    CHECK(e.kind() == CriticalValueError::Kind::Precondition);
  }
}
