#pragma once

#include <cmath>
#include <limits>

namespace csd {

/// A real number stored as sign * exp(log_abs). Products and quotients are exact
/// in this representation, so magnitudes far outside the double range survive.
struct LogSignedValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogSignedValue from_value(double x) {
    if (x == 0.0) return {};
    return {std::log(std::abs(x)), x > 0.0 ? 1 : -1};
  }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  bool is_zero() const { return sign == 0; }

  friend LogSignedValue operator*(LogSignedValue a, LogSignedValue b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.log_abs + b.log_abs, a.sign * b.sign};
  }
  friend LogSignedValue operator/(LogSignedValue a, LogSignedValue b) {
    if (b.sign == 0) {
      return {std::numeric_limits<double>::infinity(), a.sign == 0 ? 0 : a.sign};
    }
    if (a.sign == 0) return {};
    return {a.log_abs - b.log_abs, a.sign * b.sign};
  }
};

}  // namespace csd
