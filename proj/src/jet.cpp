#include "csd/jet.hpp"

#include <cmath>

#include "csd/common.hpp"

namespace csd {

namespace {

void require_same_order(const TaylorJet& a, const TaylorJet& b) {
  if (a.order() != b.order()) throw ParameterError("TaylorJet: order mismatch");
}

}  // namespace

TaylorJet::TaylorJet(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) throw ParameterError("TaylorJet: needs at least one coefficient");
}

TaylorJet TaylorJet::constant(double value, std::size_t order) {
  std::vector<double> c(order + 1, 0.0);
  c[0] = value;
  return TaylorJet(std::move(c));
}

TaylorJet TaylorJet::variable(double t0, std::size_t order, double step) {
  std::vector<double> c(order + 1, 0.0);
  c[0] = t0;
  if (order >= 1) c[1] = step;
  return TaylorJet(std::move(c));
}

double TaylorJet::derivative(std::size_t j) const {
  double f = 1.0;
  for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
  return c_[j] * f;
}

TaylorJet& TaylorJet::operator+=(const TaylorJet& o) {
  require_same_order(*this, o);
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
  return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& o) {
  require_same_order(*this, o);
  for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
  return *this;
}

TaylorJet& TaylorJet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

TaylorJet& TaylorJet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
  require_same_order(a, b);
  const std::size_t n = a.order();
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += a[j] * b[k - j];
    c[k] = s;
  }
  return TaylorJet(std::move(c));
}

TaylorJet operator/(const TaylorJet& a, const TaylorJet& b) {
  require_same_order(a, b);
  if (b[0] == 0.0) throw DomainError("TaylorJet: division by a series with zero constant term");
  const std::size_t n = a.order();
  std::vector<double> q(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= b[j] * q[k - j];
    q[k] = s / b[0];
  }
  return TaylorJet(std::move(q));
}

TaylorJet exp(const TaylorJet& a) {
  const std::size_t n = a.order();
  std::vector<double> e(n + 1, 0.0);
  e[0] = std::exp(a[0]);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return TaylorJet(std::move(e));
}

TaylorJet log(const TaylorJet& a) {
  if (a[0] <= 0.0) throw DomainError("TaylorJet: log of a series with nonpositive constant term");
  const std::size_t n = a.order();
  std::vector<double> l(n + 1, 0.0);
  l[0] = std::log(a[0]);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * l[j] * a[k - j];
    l[k] = (a[k] - s / static_cast<double>(k)) / a[0];
  }
  return TaylorJet(std::move(l));
}

TaylorJet pow(const TaylorJet& a, double r) {
  if (a[0] <= 0.0) throw DomainError("TaylorJet: pow of a series with nonpositive constant term");
  const std::size_t n = a.order();
  std::vector<double> p(n + 1, 0.0);
  p[0] = std::pow(a[0], r);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      s += ((r + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a[j] * p[k - j];
    }
    p[k] = s / (static_cast<double>(k) * a[0]);
  }
  return TaylorJet(std::move(p));
}

TaylorJet reciprocal(const TaylorJet& a) {
  return TaylorJet::constant(1.0, a.order()) / a;
}

}  // namespace csd
