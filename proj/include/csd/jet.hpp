#pragma once

#include <cstddef>
#include <vector>

namespace csd {

/// Truncated Taylor series f(t0 + x) = sum_j c_j x^j, j = 0..order.
///
/// Coefficient j is f^{(j)}(t0) / j!. Arithmetic follows the usual
/// power-series recurrences, each O(order^2).
class TaylorJet {
 public:
  TaylorJet() = default;
  explicit TaylorJet(std::vector<double> coefficients);

  static TaylorJet constant(double value, std::size_t order);
  /// The independent variable t0 + step * x.
  static TaylorJet variable(double t0, std::size_t order, double step = 1.0);

  std::size_t order() const { return c_.size() - 1; }
  double operator[](std::size_t j) const { return c_[j]; }
  double& operator[](std::size_t j) { return c_[j]; }
  const std::vector<double>& coefficients() const { return c_; }
  /// j! * c_j, i.e. the j-th derivative at the expansion point.
  double derivative(std::size_t j) const;

  TaylorJet& operator+=(const TaylorJet& o);
  TaylorJet& operator-=(const TaylorJet& o);
  TaylorJet& operator*=(double s);
  TaylorJet& operator+=(double s);

  friend TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
  friend TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
  friend TaylorJet operator*(TaylorJet a, double s) { return a *= s; }
  friend TaylorJet operator*(double s, TaylorJet a) { return a *= s; }
  friend TaylorJet operator+(TaylorJet a, double s) { return a += s; }
  friend TaylorJet operator-(const TaylorJet& a) { return a * -1.0; }
  friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b);
  friend TaylorJet operator/(const TaylorJet& a, const TaylorJet& b);

 private:
  std::vector<double> c_;
};

TaylorJet exp(const TaylorJet& a);
TaylorJet log(const TaylorJet& a);
/// a^r for real r; requires a[0] > 0.
TaylorJet pow(const TaylorJet& a, double r);
TaylorJet reciprocal(const TaylorJet& a);

}  // namespace csd
