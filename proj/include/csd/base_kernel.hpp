#pragma once

#include <span>
#include <string>
#include <vector>

#include "csd/common.hpp"

namespace csd {

/// GaussianRBF:  k1(x, y) = exp(-(x - y)^2 / (2 sigma^2)).
/// WeightedRBF:  k1(x, y) = w(x) w(y) exp(-(x - y)^2 / (2 sigma^2)), w(x) = x (1 - x).
/// The weight makes every RKHS function vanish on the faces of the cube, which the
/// Stein identity E[T g(U)] = 0 needs; with the plain RBF the boundary term survives.
enum class BaseKernelKind { GaussianRBF, WeightedRBF };

std::string to_string(BaseKernelKind kind);
BaseKernelKind kernel_kind_from_string(const std::string& name);

/// Boundary weight w(x) = x (1 - x) and its log-derivative w'(x) / w(x).
inline double boundary_weight(double x) { return x * (1.0 - x); }
inline double boundary_log_slope(double x) { return (1.0 - 2.0 * x) / (x * (1.0 - x)); }

/// Separable base kernel k(u, v) = prod_j k1(u_j, v_j).
struct BaseKernelSpec {
  BaseKernelKind kind = BaseKernelKind::GaussianRBF;
  double bandwidth = 1.0;

  void validate() const;
};

/// k together with its partials expressed as ratios to k.
struct KernelDerivBundle {
  double k = 0.0;
  std::vector<double> grad_u_ratio;  // d_{u_j} k / k
  std::vector<double> grad_v_ratio;  // d_{v_j} k / k
  double hess_trace_ratio = 0.0;     // sum_j d_{u_j} d_{v_j} k / k
};

KernelDerivBundle eval_bundle(const BaseKernelSpec& spec, std::span<const double> u, std::span<const double> v);

/// Median pairwise Euclidean distance over an evenly strided subsample of at
/// most `max_points` rows, divided by sqrt(2).
double median_bandwidth(const PointMatrix& sample, std::size_t max_points = 1000);

}  // namespace csd
