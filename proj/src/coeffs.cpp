#include "frontier_sis/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace frontier_sis {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw CoefficientError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

CoefficientModel::CoefficientModel(CoefficientParams params) : p_(std::move(params)) {
  require_positive(p_.sigma, "sigma");
  require_positive(p_.mu1, "mu1");
  require_positive(p_.mu2, "mu2");
  if (p_.media.inf() < 0.0) throw CoefficientError("media field must be nonnegative");
  if (p_.beds.inf() < 0.0) throw CoefficientError("bed field must be nonnegative");
  if (p_.beta0.inf() < 0.0) throw CoefficientError("beta0 must be nonnegative");
  if (p_.gamma0.inf() < 0.0) throw CoefficientError("gamma0 must be nonnegative");
  if (!(p_.beta_I_gain >= 0.0) || !std::isfinite(p_.beta_I_gain)) {
    throw CoefficientError("beta_I_gain must be nonnegative");
  }
  // gamma0 <= gamma1 pointwise; both families are compared on a dense sample
  // plus the far field, which is exact for constants and piecewise-linear knots.
  auto check_order = [&](double x) {
    if (p_.gamma0(x) > p_.gamma1(x) + 1e-12) {
      throw CoefficientError("gamma0 must not exceed gamma1 (at x = " + std::to_string(x) + ")");
    }
  };
  for (int i = -2000; i <= 2000; ++i) check_order(0.05 * i);
  for (const auto* f : {&p_.gamma0, &p_.gamma1}) {
    if (const auto* pl = std::get_if<SpatialFunction::PiecewiseLinear>(&f->variant())) {
      for (const auto& kv : pl->knots) check_order(kv.first);
    }
  }
  if (p_.gamma0.far_field(-1) > p_.gamma1.far_field(-1) + 1e-12 ||
      p_.gamma0.far_field(1) > p_.gamma1.far_field(1) + 1e-12) {
    throw CoefficientError("gamma0 must not exceed gamma1 in the far field");
  }
}

double CoefficientModel::beta(double x, double infected) const {
  if (!(infected >= 0.0)) throw CoefficientError("beta: infected density must be nonnegative");
  const double attenuation = std::exp(-p_.media(x));
  return p_.beta0(x) * attenuation * (1.0 + p_.beta_I_gain * infected / (1.0 + infected));
}

double CoefficientModel::gamma(double x, double infected) const {
  if (!(infected >= 0.0)) throw CoefficientError("gamma: infected density must be nonnegative");
  const double g0 = p_.gamma0(x);
  const double g1 = p_.gamma1(x);
  const double b = p_.beds(x);
  double ratio;
  if (b > 0.0) {
    ratio = b / (b + infected);
  } else {
    ratio = infected > 0.0 ? 0.0 : 1.0;
  }
  return g0 + (g1 - g0) * ratio;
}

double CoefficientModel::threshold(double x) const {
  return p_.sigma * beta(x, 0.0) / p_.mu1 - p_.mu2 - gamma(x, 0.0);
}

std::vector<double> CoefficientModel::a_profile(std::span<const double> nodes) const {
  std::vector<double> a(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i])) throw CoefficientError("a_profile: node positions must be finite");
    a[i] = threshold(nodes[i]);
  }
  return a;
}

double CoefficientModel::beta_sup() const {
  return p_.beta0.sup() * std::exp(-p_.media.inf()) * (1.0 + p_.beta_I_gain);
}

double CoefficientModel::beta_I_derivative_bound() const {
  // d/dI [I / (1 + I)] = 1 / (1 + I)^2 <= 1
  return p_.beta0.sup() * std::exp(-p_.media.inf()) * p_.beta_I_gain;
}

double CoefficientModel::gamma_I_derivative_bound() const {
  // |d/dI b / (b + I)| = b / (b + I)^2 <= 1 / b
  double spread = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double x = 0.05 * i;
    spread = std::max(spread, p_.gamma1(x) - p_.gamma0(x));
  }
  spread = std::max({spread, p_.gamma1.far_field(-1) - p_.gamma0.far_field(-1),
                     p_.gamma1.far_field(1) - p_.gamma0.far_field(1)});
  if (spread == 0.0) return 0.0;
  const double b_min = p_.beds.inf();
  if (b_min <= 0.0) return std::numeric_limits<double>::infinity();
  return spread / b_min;
}

CoefficientModel CoefficientModel::with_media_scale(double scale) const {
  if (!(scale >= 0.0)) throw CoefficientError("media scale must be nonnegative");
  CoefficientParams p = p_;
  p.media = p_.media.scaled(scale);
  return CoefficientModel(std::move(p));
}

CoefficientModel CoefficientModel::with_bed_scale(double scale) const {
  if (!(scale >= 0.0)) throw CoefficientError("bed scale must be nonnegative");
  CoefficientParams p = p_;
  p.beds = p_.beds.scaled(scale);
  return CoefficientModel(std::move(p));
}

}  // namespace frontier_sis
