#include "csd/finite_difference.hpp"

#include <algorithm>
#include <cmath>

namespace csd {

namespace {

// Kernel value only; every derivative below is numerical.
double kernel_value(const BaseKernelSpec& base, std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  double w = 1.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    s += (u[j] - v[j]) * (u[j] - v[j]);
    if (base.kind == BaseKernelKind::WeightedRBF) w *= u[j] * (1.0 - u[j]) * v[j] * (1.0 - v[j]);
  }
  return w * std::exp(-s / (2.0 * base.bandwidth * base.bandwidth));
}

}  // namespace

double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

std::vector<double> fd_score(const CopulaModel& model, std::span<const double> u) {
  std::vector<double> x(u.begin(), u.end());
  std::vector<double> g(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x0 = x[j];
    const double h = 1e-3 * std::min({x0, 1.0 - x0, 0.1});
    g[j] = central_difference(
        [&](double t) {
          x[j] = t;
          const double v = log_density(model, x, 1e-300);
          x[j] = x0;
          return v;
        },
        x0, h);
  }
  return g;
}

double SteinTerms::magnitude() const {
  return std::abs(score_score) + std::abs(score_grad_v) + std::abs(score_grad_u) + std::abs(trace);
}

SteinTerms fd_stein_kernel(const CopulaModel& model, const BaseKernelSpec& base, std::span<const double> u,
                           std::span<const double> v) {
  const double sigma = base.bandwidth;
  const std::vector<double> su = fd_score(model, u);
  const std::vector<double> sv = fd_score(model, v);
  std::vector<double> a(u.begin(), u.end()), b(v.begin(), v.end());
  const double h = 1e-4 * sigma;
  SteinTerms t;
  const double k = kernel_value(base, a, b);
  for (std::size_t j = 0; j < u.size(); ++j) {
    t.score_score += su[j] * sv[j] * k;
    const double aj = a[j], bj = b[j];
    const double dk_du = central_difference(
        [&](double x) {
          a[j] = x;
          const double r = kernel_value(base, a, b);
          a[j] = aj;
          return r;
        },
        aj, h);
    const double dk_dv = central_difference(
        [&](double x) {
          b[j] = x;
          const double r = kernel_value(base, a, b);
          b[j] = bj;
          return r;
        },
        bj, h);
    auto at = [&](double da, double db) {
      a[j] = aj + da;
      b[j] = bj + db;
      const double r = kernel_value(base, a, b);
      a[j] = aj;
      b[j] = bj;
      return r;
    };
    const double hm = 1e-3 * sigma;
    const double mixed = (at(hm, hm) - at(hm, -hm) - at(-hm, hm) + at(-hm, -hm)) / (4.0 * hm * hm);
    t.score_grad_v += su[j] * dk_dv;
    t.score_grad_u += sv[j] * dk_du;
    t.trace += mixed;
  }
  return t;
}

}  // namespace csd
