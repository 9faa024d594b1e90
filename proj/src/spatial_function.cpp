#include "frontier_sis/spatial_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace frontier_sis {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

SpatialFunction::SpatialFunction(Constant c) : v_(c) {
  if (!std::isfinite(c.level)) throw std::invalid_argument("constant level must be finite");
}

SpatialFunction::SpatialFunction(GaussianBump g) : v_(g) {
  if (!(g.width > 0.0)) throw std::invalid_argument("gaussian-bump width must be positive");
  if (!std::isfinite(g.level) || !std::isfinite(g.amplitude) || !std::isfinite(g.center)) {
    throw std::invalid_argument("gaussian-bump parameters must be finite");
  }
}

SpatialFunction::SpatialFunction(PiecewiseLinear p) : v_(std::move(p)) {
  const auto& knots = std::get<PiecewiseLinear>(v_).knots;
  if (knots.empty()) throw std::invalid_argument("piecewise-linear needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
      throw std::invalid_argument("piecewise-linear knots must be finite");
    }
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
      throw std::invalid_argument("piecewise-linear knot positions must be strictly increasing");
    }
  }
}

double SpatialFunction::operator()(double x) const {
  return std::visit(
      overloaded{
          [](const Constant& c) { return c.level; },
          [x](const GaussianBump& g) {
            const double z = (x - g.center) / g.width;
            return g.level + g.amplitude * std::exp(-0.5 * z * z);
          },
          [x](const PiecewiseLinear& p) {
            const auto& k = p.knots;
            if (x <= k.front().first) return k.front().second;
            if (x >= k.back().first) return k.back().second;
            auto it = std::upper_bound(k.begin(), k.end(), x,
                                       [](double v, const auto& knot) { return v < knot.first; });
            const auto& [x1, y1] = *it;
            const auto& [x0, y0] = *(it - 1);
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
          },
      },
      v_);
}

double SpatialFunction::sup() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.level; },
                        [](const GaussianBump& g) { return g.level + std::max(g.amplitude, 0.0); },
                        [](const PiecewiseLinear& p) {
                          double m = p.knots.front().second;
                          for (const auto& kv : p.knots) m = std::max(m, kv.second);
                          return m;
                        },
                    },
                    v_);
}

double SpatialFunction::inf() const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.level; },
                        [](const GaussianBump& g) { return g.level + std::min(g.amplitude, 0.0); },
                        [](const PiecewiseLinear& p) {
                          double m = p.knots.front().second;
                          for (const auto& kv : p.knots) m = std::min(m, kv.second);
                          return m;
                        },
                    },
                    v_);
}

double SpatialFunction::far_field(int side) const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.level; },
                        [](const GaussianBump& g) { return g.level; },
                        [side](const PiecewiseLinear& p) {
                          return side < 0 ? p.knots.front().second : p.knots.back().second;
                        },
                    },
                    v_);
}

bool SpatialFunction::is_constant() const {
  return std::visit(overloaded{
                        [](const Constant&) { return true; },
                        [](const GaussianBump& g) { return g.amplitude == 0.0; },
                        [this](const PiecewiseLinear&) { return sup() == inf(); },
                    },
                    v_);
}

SpatialFunction SpatialFunction::scaled(double scale) const {
  return std::visit(overloaded{
                        [scale](const Constant& c) { return SpatialFunction(Constant{c.level * scale}); },
                        [scale](GaussianBump g) {
                          g.level *= scale;
                          g.amplitude *= scale;
                          return SpatialFunction(g);
                        },
                        [scale](PiecewiseLinear p) {
                          for (auto& kv : p.knots) kv.second *= scale;
                          return SpatialFunction(std::move(p));
                        },
                    },
                    v_);
}

SpatialFunction SpatialFunction::dilated(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("dilation factor must be positive");
  return std::visit(overloaded{
                        [](const Constant& c) { return SpatialFunction(c); },
                        [factor](GaussianBump g) {
                          g.center *= factor;
                          g.width *= factor;
                          return SpatialFunction(g);
                        },
                        [factor](PiecewiseLinear p) {
                          for (auto& kv : p.knots) kv.first *= factor;
                          return SpatialFunction(std::move(p));
                        },
                    },
                    v_);
}

std::string_view SpatialFunction::kind_name() const {
  return std::visit(overloaded{
                        [](const Constant&) { return std::string_view("constant"); },
                        [](const GaussianBump&) { return std::string_view("gaussian-bump"); },
                        [](const PiecewiseLinear&) { return std::string_view("piecewise-linear"); },
                    },
                    v_);
}

}  // namespace frontier_sis
