#pragma once

#include <string>

namespace confset {

enum class LossKind { boosting, logistic, squared };

// Convex surrogate phi: boosting exp(-x), logistic log(1+exp(-x)),
// squared (x-1)^2. Values and derivatives saturate instead of overflowing.
class Loss {
 public:
  explicit Loss(LossKind kind) : kind_(kind) {}

  static Loss from_name(const std::string& name);
  std::string name() const;
  LossKind kind() const { return kind_; }

  double value(double x) const;
  double derivative(double x) const;

  // max |phi'| on [-bound, bound].
  double lipschitz_bound(double bound) const;
  // min phi'' on [-bound, bound]; recorded for documentation and tests.
  double convexity_modulus_constant(double bound) const;
  // Exponent s of the calibration-function growth condition; 2 for all kinds.
  int surrogate_exponent() const { return 2; }

 private:
  LossKind kind_;
};

struct CalibrationThreshold {
  double delta_star = 0.0;
  double g_level = 0.0;
};

// Threshold delta* with phi'(d*)/(phi'(d*)+phi'(-d*)) = g_level, solved in
// closed form. Requires g_level in (0,1); both derivatives at +-delta* come
// out strictly negative (for squared loss delta* = 1-2g lands in (-1,1)).
CalibrationThreshold calibrated_threshold(const Loss& loss, double g_level);

// Same threshold by bisection on [-50, 50] (squared loss: on (-1, 1)),
// 200 iterations; kept as an independent cross-check of the closed forms.
CalibrationThreshold calibrated_threshold_numeric(const Loss& loss, double g_level);

// The ratio phi'(d)/(phi'(d)+phi'(-d)) that the threshold inverts; exposed
// for round-trip tests.
double calibration_ratio(const Loss& loss, double delta);

}  // namespace confset
