#pragma once

#include <span>
#include <vector>

#include "csd/base_kernel.hpp"
#include "csd/copula_model.hpp"

namespace csd {

/// Points clamped into the open cube together with their scores, computed once
/// so pair loops cost O(d) per pair.
struct ScoredSample {
  PointMatrix points;
  PointMatrix scores;
  std::size_t clamped = 0;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
};

/// k_C(u, v) = s(u)'s(v) k + s(u)' grad_v k + s(v)' grad_u k + tr(grad_u grad_v' k).
class SteinKernelEvaluator {
 public:
  SteinKernelEvaluator(CopulaModel model, BaseKernelSpec base, double clamp_eps = kMinClampEps);

  const CopulaModel& model() const { return model_; }
  const BaseKernelSpec& base() const { return base_; }
  double clamp_eps() const { return clamp_eps_; }
  int dim() const { return model_.dim(); }

  double operator()(std::span<const double> u, std::span<const double> v) const;
  /// k_C(u, u) = W(u)^2 (|s(u) + grad log W(u)|^2 + d / sigma^2); W = 1 for the plain RBF.
  double diag(std::span<const double> u) const;

  /// Clamps with eps = max(clamp_eps, 1/(4n)) and scores every row.
  ScoredSample prepare(const PointMatrix& points, int threads = 1) const;

  /// Pair kernel from precomputed scores, symmetric bit-for-bit under swapping (u, su) and (v, sv).
  double pair(std::span<const double> u, std::span<const double> su, std::span<const double> v,
              std::span<const double> sv) const;
  double pair_diag(std::span<const double> u, std::span<const double> su) const;

 private:
  CopulaModel model_;
  BaseKernelSpec base_;
  double clamp_eps_;
  double inv_s2_;
};

}  // namespace csd
