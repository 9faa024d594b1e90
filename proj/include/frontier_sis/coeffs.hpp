#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "frontier_sis/spatial_function.hpp"

namespace frontier_sis {

class CoefficientError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Epidemiological coefficients of the S-I system.
///
/// Contact rate:   beta(x, I)  = beta0(x) * exp(-m(x)) * (1 + c * I / (1 + I))
/// Recovery rate:  gamma(x, I) = gamma0(x) + (gamma1(x) - gamma0(x)) * b(x) / (b(x) + I)
///
/// beta decreases with media coverage m and increases (boundedly) in I; gamma
/// increases with bed level b and decreases in I. At b(x) = 0 the bed ratio is
/// taken as 0 for I > 0 and 1 for I = 0.
struct CoefficientParams {
  double sigma = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  SpatialFunction beta0 = SpatialFunction::constant(1.5);
  SpatialFunction media = SpatialFunction::constant(0.0);
  SpatialFunction beds = SpatialFunction::constant(1.0);
  SpatialFunction gamma0 = SpatialFunction::constant(0.0);
  SpatialFunction gamma1 = SpatialFunction::constant(0.0);
  double beta_I_gain = 0.0;
};

class CoefficientModel {
 public:
  explicit CoefficientModel(CoefficientParams params);

  double beta(double x, double infected) const;
  double gamma(double x, double infected) const;

  /// a(x) = sigma * beta(x, 0) / mu1 - mu2 - gamma(x, 0)
  double threshold(double x) const;
  std::vector<double> a_profile(std::span<const double> nodes) const;

  double disease_free_level() const { return p_.sigma / p_.mu1; }
  double beta_sup() const;
  double gamma_high_sup() const { return p_.gamma1.sup(); }
  /// Bounds on |d beta / dI| and |d gamma / dI| over x in R, I >= 0.
  /// The gamma bound is infinite when inf b = 0 and gamma1 > gamma0 somewhere.
  double beta_I_derivative_bound() const;
  double gamma_I_derivative_bound() const;

  /// Media field multiplied by `scale` (scale >= 0).
  CoefficientModel with_media_scale(double scale) const;
  CoefficientModel with_bed_scale(double scale) const;

  const CoefficientParams& params() const { return p_; }

 private:
  CoefficientParams p_;
};

}  // namespace frontier_sis
