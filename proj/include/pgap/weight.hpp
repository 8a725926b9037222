#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pgap/errors.hpp"
#include "pgap/geometry.hpp"

namespace pgap {

enum class WeightKind { Constant, AffinePower, GaussianY, Product };

enum class ConcavityClass { PowerConcave, LogConcave, None };

/// Evaluable positive weight with declared concavity class. The same object
/// serves the 2D solvers and, restricted to the horizontal axis (y = 0), the
/// one-dimensional ones.
class Weight {
 public:
  static Weight constant(double value = 1.0) {
    if (!(value > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "constant weight must be positive");
    Weight w;
    w.kind_ = WeightKind::Constant;
    w.value_ = value;
    return w;
  }

  /// ell(x,y)^m with ell(x,y) = ax*x + ay*y + b. Declared (1/m)-power-concave.
  static Weight affine_power(double ax, double ay, double b, int exponent) {
    if (exponent < 1)
      throw Error(ErrorCode::InvalidExponent, "affine_power exponent must be >= 1");
    Weight w;
    w.kind_ = WeightKind::AffinePower;
    w.ax_ = ax;
    w.ay_ = ay;
    w.b_ = b;
    w.exponent_ = exponent;
    return w;
  }

  /// n * exp(-(n y)^2): the log-concave counterexample family.
  static Weight gaussian_y(double scale) {
    if (!(scale > 0.0))
      throw Error(ErrorCode::NonPositiveValue, "gaussian_y scale must be positive");
    Weight w;
    w.kind_ = WeightKind::GaussianY;
    w.scale_ = scale;
    return w;
  }

  static Weight product(std::vector<Weight> factors) {
    if (factors.empty())
      throw Error(ErrorCode::NonPositiveValue, "product weight needs factors");
    Weight w;
    w.kind_ = WeightKind::Product;
    w.factors_ = std::make_shared<std::vector<Weight>>(std::move(factors));
    return w;
  }

  WeightKind kind() const { return kind_; }
  double constant_value() const { return value_; }
  double gaussian_scale() const { return scale_; }
  int affine_exponent() const { return exponent_; }
  Vec2 affine_gradient() const { return {ax_, ay_}; }
  double affine_offset() const { return b_; }
  const std::vector<Weight>& factors() const { return *factors_; }

  double operator()(Vec2 p) const { return eval(p); }
  double operator()(double x) const { return eval({x, 0.0}); }

  double eval(Vec2 p) const {
    switch (kind_) {
      case WeightKind::Constant:
        return value_;
      case WeightKind::AffinePower: {
        const double ell = ax_ * p.x + ay_ * p.y + b_;
        if (ell < 0.0)
          throw Error(ErrorCode::OutsideDomain,
                      "affine_power linear form negative at evaluation point");
        return std::pow(ell, exponent_);
      }
      case WeightKind::GaussianY: {
        const double t = scale_ * p.y;
        return scale_ * std::exp(-t * t);
      }
      case WeightKind::Product: {
        double v = 1.0;
        for (const auto& f : *factors_) v *= f.eval(p);
        if (std::isnan(v) || v < 0.0)
          throw Error(ErrorCode::NonPositiveValue, "product weight not positive");
        return v;
      }
    }
    return 0.0;
  }

  /// d/dx log w(x, 0): exact for constant / affine_power / gaussian_y and
  /// sums over product factors. Used by the refined 1D lower bound.
  double log_derivative_1d(double x) const {
    switch (kind_) {
      case WeightKind::Constant:
        return 0.0;
      case WeightKind::AffinePower: {
        const double ell = ax_ * x + b_;
        if (ell <= 0.0)
          throw Error(ErrorCode::OutsideDomain, "log derivative at zero of linear form");
        return exponent_ * ax_ / ell;
      }
      case WeightKind::GaussianY:
        return 0.0;  // constant along y = 0
      case WeightKind::Product: {
        double s = 0.0;
        for (const auto& f : *factors_) s += f.log_derivative_1d(x);
        return s;
      }
    }
    return 0.0;
  }

  ConcavityClass concavity_class() const {
    switch (kind_) {
      case WeightKind::Constant:
      case WeightKind::AffinePower:
        return ConcavityClass::PowerConcave;
      case WeightKind::GaussianY:
        return ConcavityClass::LogConcave;
      case WeightKind::Product: {
        bool all_power = true;
        bool all_log = true;
        for (const auto& f : *factors_) {
          const ConcavityClass c = f.concavity_class();
          all_power = all_power && (c == ConcavityClass::PowerConcave);
          all_log = all_log && (c != ConcavityClass::None);
        }
        if (all_power) return ConcavityClass::PowerConcave;
        if (all_log) return ConcavityClass::LogConcave;
        return ConcavityClass::None;
      }
    }
    return ConcavityClass::None;
  }

  /// The m of the declared (1/m)-concavity; products add exponents
  /// (geometric-mean argument). Constant weights report m = 1.
  std::optional<int> power_concavity_m() const {
    switch (kind_) {
      case WeightKind::Constant:
        return 1;
      case WeightKind::AffinePower:
        return exponent_;
      case WeightKind::GaussianY:
        return std::nullopt;
      case WeightKind::Product: {
        int total = 0;
        for (const auto& f : *factors_) {
          auto m = f.power_concavity_m();
          if (!m) return std::nullopt;
          total += *m;
        }
        return total;
      }
    }
    return std::nullopt;
  }

  /// Smallest integer m with w^(1/m) concave on a slab |y| <= y_extent.
  /// The gaussian family is not power concave on all of R^2, but on a
  /// bounded slab it is (1/m)-concave once m >= 2 (n y_extent)^2; this is
  /// what feeds the weighted L^inf bound for the counterexample runs.
  std::optional<long long> power_concavity_m_on(double y_extent) const {
    switch (kind_) {
      case WeightKind::Constant:
        return 1;
      case WeightKind::AffinePower:
        return exponent_;
      case WeightKind::GaussianY: {
        const double t = scale_ * y_extent;
        return std::max<long long>(1, (long long)std::ceil(2.0 * t * t));
      }
      case WeightKind::Product: {
        long long total = 0;
        for (const auto& f : *factors_) {
          auto m = f.power_concavity_m_on(y_extent);
          if (!m) return std::nullopt;
          total += *m;
        }
        return total;
      }
    }
    return std::nullopt;
  }

  bool is_constant() const { return kind_ == WeightKind::Constant; }

  std::string describe() const {
    switch (kind_) {
      case WeightKind::Constant:
        return "constant(" + std::to_string(value_) + ")";
      case WeightKind::AffinePower:
        return "(" + std::to_string(ax_) + "x+" + std::to_string(ay_) + "y+" +
               std::to_string(b_) + ")^" + std::to_string(exponent_);
      case WeightKind::GaussianY:
        return "gaussian_y(n=" + std::to_string(scale_) + ")";
      case WeightKind::Product: {
        std::string s = "product(";
        for (size_t i = 0; i < factors_->size(); ++i) {
          if (i) s += ", ";
          s += (*factors_)[i].describe();
        }
        return s + ")";
      }
    }
    return "?";
  }

 private:
  WeightKind kind_ = WeightKind::Constant;
  double value_ = 1.0;                       // constant
  double ax_ = 0.0, ay_ = 0.0, b_ = 0.0;     // affine_power linear form
  int exponent_ = 1;                         // affine_power
  double scale_ = 1.0;                       // gaussian_y
  std::shared_ptr<std::vector<Weight>> factors_;
};

} // namespace pgap
