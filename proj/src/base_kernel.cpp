#include "csd/base_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csd {

std::string to_string(BaseKernelKind kind) {
  return kind == BaseKernelKind::GaussianRBF ? "rbf" : "weighted_rbf";
}

BaseKernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "rbf") return BaseKernelKind::GaussianRBF;
  if (name == "weighted_rbf") return BaseKernelKind::WeightedRBF;
  throw ParameterError("unknown base kernel '" + name + "'");
}

void BaseKernelSpec::validate() const {
  if (!(std::isfinite(bandwidth) && bandwidth > 0.0)) {
    throw ParameterError("kernel bandwidth must be finite and positive");
  }
}

KernelDerivBundle eval_bundle(const BaseKernelSpec& spec, std::span<const double> u, std::span<const double> v) {
  spec.validate();
  if (u.size() != v.size()) throw ParameterError("eval_bundle: dimension mismatch");
  if (spec.kind == BaseKernelKind::WeightedRBF) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (!(u[j] > 0.0 && u[j] < 1.0 && v[j] > 0.0 && v[j] < 1.0)) {
        throw DomainError("weighted RBF kernel requires points inside the open cube");
      }
    }
  }
  const std::size_t d = u.size();
  const double inv_s2 = 1.0 / (spec.bandwidth * spec.bandwidth);
  KernelDerivBundle b;
  b.grad_u_ratio.resize(d);
  b.grad_v_ratio.resize(d);
  const bool weighted = spec.kind == BaseKernelKind::WeightedRBF;
  double log_k = 0.0;
  double weight = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double delta = u[j] - v[j];
    log_k -= 0.5 * delta * delta * inv_s2;
    const double a = weighted ? boundary_log_slope(u[j]) : 0.0;
    const double c = weighted ? boundary_log_slope(v[j]) : 0.0;
    if (weighted) weight *= boundary_weight(u[j]) * boundary_weight(v[j]);
    b.grad_u_ratio[j] = a - delta * inv_s2;
    b.grad_v_ratio[j] = c + delta * inv_s2;
    b.hess_trace_ratio += a * c + (a - c) * delta * inv_s2 + inv_s2 - delta * delta * inv_s2 * inv_s2;
  }
  b.k = weight * std::exp(log_k);
  return b;
}

double median_bandwidth(const PointMatrix& sample, std::size_t max_points) {
  const std::size_t n = sample.rows();
  if (n < 2) throw DegenerateError("median bandwidth needs at least two points");
  const std::size_t m = std::min(n, std::max<std::size_t>(max_points, 2));
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i * n / m;
  std::vector<double> dist;
  dist.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a) {
    const auto ra = sample.row(idx[a]);
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto rb = sample.row(idx[b]);
      double s = 0.0;
      for (std::size_t j = 0; j < ra.size(); ++j) {
        const double delta = ra[j] - rb[j];
        s += delta * delta;
      }
      dist.push_back(std::sqrt(s));
    }
  }
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double med = *mid;
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), mid);
    med = 0.5 * (med + lower);
  }
  if (!(med > 0.0)) throw DegenerateError("median pairwise distance is zero (identical points)");
  return med / std::numbers::sqrt2;
}

}  // namespace csd
