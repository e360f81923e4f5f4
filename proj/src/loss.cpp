#include "confset/loss.hpp"

#include <cmath>
#include <limits>

#include "confset/error.hpp"

namespace confset {
namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

double saturated_exp(double x) {
  if (x > 700.0) return kHuge;  // exp overflows past ~709.78
  return std::exp(x);
}

}  // namespace

Loss Loss::from_name(const std::string& name) {
  if (name == "boosting") return Loss(LossKind::boosting);
  if (name == "logistic") return Loss(LossKind::logistic);
  if (name == "squared") return Loss(LossKind::squared);
  throw ValidationError("unknown loss '" + name + "' (expected boosting, logistic or squared)");
}

std::string Loss::name() const {
  switch (kind_) {
    case LossKind::boosting: return "boosting";
    case LossKind::logistic: return "logistic";
    case LossKind::squared: return "squared";
  }
  return "";
}

double Loss::value(double x) const {
  switch (kind_) {
    case LossKind::boosting:
      return saturated_exp(-x);
    case LossKind::logistic:
      // Branch keeps the argument of exp non-positive on both sides.
      return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
    case LossKind::squared:
      return (x - 1.0) * (x - 1.0);
  }
  return 0.0;
}

double Loss::derivative(double x) const {
  switch (kind_) {
    case LossKind::boosting:
      return -saturated_exp(-x);
    case LossKind::logistic:
      return -1.0 / (1.0 + saturated_exp(x));
    case LossKind::squared:
      return 2.0 * (x - 1.0);
  }
  return 0.0;
}

double Loss::lipschitz_bound(double bound) const {
  switch (kind_) {
    case LossKind::boosting: return saturated_exp(bound);
    case LossKind::logistic: return 1.0 / (1.0 + std::exp(-bound));
    case LossKind::squared: return 2.0 * (bound + 1.0);
  }
  return 0.0;
}

double Loss::convexity_modulus_constant(double bound) const {
  switch (kind_) {
    case LossKind::boosting: return std::exp(-bound);
    case LossKind::logistic: {
      const double e = std::exp(bound);
      return e / ((1.0 + e) * (1.0 + e));
    }
    case LossKind::squared: return 2.0;
  }
  return 0.0;
}

double calibration_ratio(const Loss& loss, double delta) {
  const double at_plus = loss.derivative(delta);
  const double at_minus = loss.derivative(-delta);
  return at_plus / (at_plus + at_minus);
}

namespace {

void check_g_level(double g_level) {
  if (!(g_level > 0.0 && g_level < 1.0)) {
    throw ValidationError("calibration level must lie in (0, 1), got " + std::to_string(g_level));
  }
}

CalibrationThreshold checked(const Loss& loss, double delta_star, double g_level) {
  if (!(loss.derivative(delta_star) < 0.0 && loss.derivative(-delta_star) < 0.0)) {
    throw ValidationError("no admissible threshold: derivative not negative at +-delta* for g=" +
                          std::to_string(g_level));
  }
  return CalibrationThreshold{delta_star, g_level};
}

}  // namespace

CalibrationThreshold calibrated_threshold(const Loss& loss, double g_level) {
  check_g_level(g_level);
  double delta_star = 0.0;
  switch (loss.kind()) {
    case LossKind::boosting:
      delta_star = 0.5 * std::log((1.0 - g_level) / g_level);
      break;
    case LossKind::logistic:
      delta_star = std::log((1.0 - g_level) / g_level);
      break;
    case LossKind::squared:
      delta_star = 1.0 - 2.0 * g_level;
      break;
  }
  return checked(loss, delta_star, g_level);
}

CalibrationThreshold calibrated_threshold_numeric(const Loss& loss, double g_level) {
  check_g_level(g_level);
  // The ratio is strictly decreasing in delta for all three kinds.
  double lo = loss.kind() == LossKind::squared ? -1.0 + 1e-12 : -50.0;
  double hi = loss.kind() == LossKind::squared ? 1.0 - 1e-12 : 50.0;
  if (!(calibration_ratio(loss, lo) >= g_level && calibration_ratio(loss, hi) <= g_level)) {
    throw ValidationError("no admissible threshold in bracket for g=" + std::to_string(g_level));
  }
  for (int iteration = 0; iteration < 200; ++iteration) {
    const double mid = 0.5 * (lo + hi);
    if (calibration_ratio(loss, mid) > g_level) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return checked(loss, 0.5 * (lo + hi), g_level);
}

}  // namespace confset
