#pragma once

#include <utility>

namespace kfol {

/// Fuzzy conjunction on [0,1]. Disjunction is derived by De Morgan duality
/// and negation is always 1 - x.
class TNorm {
 public:
  virtual ~TNorm() = default;

  virtual double conj(double a, double b) const = 0;
  /// (dT/da, dT/db) at (a, b).
  virtual std::pair<double, double> conj_partials(double a, double b) const = 0;

  double disj(double a, double b) const { return 1.0 - conj(1.0 - a, 1.0 - b); }
  std::pair<double, double> disj_partials(double a, double b) const { return conj_partials(1.0 - a, 1.0 - b); }
};

/// T(x, y) = x * y
class ProductTNorm final : public TNorm {
 public:
  double conj(double a, double b) const override { return a * b; }
  std::pair<double, double> conj_partials(double a, double b) const override { return {b, a}; }
};

const TNorm& product_tnorm();

// Checked product-logic connectives. Inputs must lie in [0,1] up to 1e-12,
// otherwise DomainError.
double tnorm_and(double a, double b);
double tnorm_or(double a, double b);
double tnorm_not(double a);

/// min(1, max(y, 0)); NonFinite for NaN/Inf.
double squash(double y);

/// 1 on the closed interval [0,1], 0 outside.
inline double squash_derivative(double y) { return (y >= 0.0 && y <= 1.0) ? 1.0 : 0.0; }

}  // namespace kfol
