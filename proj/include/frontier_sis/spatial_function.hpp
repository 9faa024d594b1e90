#pragma once

#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace frontier_sis {

/// Continuous, bounded function of one variable from one of three closed-form
/// families. Every family is Lipschitz on bounded sets.
class SpatialFunction {
 public:
  struct Constant {
    double level = 0.0;
  };
  /// level + amplitude * exp(-(x - center)^2 / (2 width^2))
  struct GaussianBump {
    double level = 0.0;
    double center = 0.0;
    double amplitude = 1.0;
    double width = 1.0;
  };
  /// Linear interpolation between knots, constant beyond the end knots.
  struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;
  };

  using Variant = std::variant<Constant, GaussianBump, PiecewiseLinear>;

  SpatialFunction() : SpatialFunction(Constant{0.0}) {}
  SpatialFunction(Constant c);
  SpatialFunction(GaussianBump g);
  SpatialFunction(PiecewiseLinear p);

  static SpatialFunction constant(double level) { return SpatialFunction(Constant{level}); }

  double operator()(double x) const;

  double sup() const;
  double inf() const;
  /// Limit as x -> -inf (side < 0) or x -> +inf (side > 0).
  double far_field(int side) const;
  bool is_constant() const;

  /// x -> scale * f(x).
  SpatialFunction scaled(double scale) const;
  /// x -> f(x / factor): stretches the graph horizontally by `factor`.
  SpatialFunction dilated(double factor) const;

  std::string_view kind_name() const;
  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

}  // namespace frontier_sis
