#include "csd/stein_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "csd/parallel.hpp"

namespace csd {

SteinKernelEvaluator::SteinKernelEvaluator(CopulaModel model, BaseKernelSpec base, double clamp_eps)
    : model_(std::move(model)), base_(base), clamp_eps_(clamp_eps) {
  base_.validate();
  if (!(clamp_eps_ > 0.0 && clamp_eps_ < 0.5)) throw ParameterError("clamp eps must lie in (0, 0.5)");
  inv_s2_ = 1.0 / (base_.bandwidth * base_.bandwidth);
}

double SteinKernelEvaluator::pair(std::span<const double> u, std::span<const double> su,
                                  std::span<const double> v, std::span<const double> sv) const {
  // Ratio form: k * [s(u).s(v) + (s(u) - s(v)).delta / sigma^2 + d / sigma^2 - |delta|^2 / sigma^4],
  // delta = u - v. Each accumulated term is invariant under swapping the arguments.
  // The weighted kernel is W(u) W(v) times the same expression with s shifted by grad log W.
  const bool weighted = base_.kind == BaseKernelKind::WeightedRBF;
  double score_dot = 0.0;
  double cross = 0.0;
  double dist2 = 0.0;
  double weight = 1.0;
  const std::size_t d = u.size();
  for (std::size_t j = 0; j < d; ++j) {
    const double delta = u[j] - v[j];
    double a = su[j];
    double b = sv[j];
    if (weighted) {
      a += boundary_log_slope(u[j]);
      b += boundary_log_slope(v[j]);
      weight *= boundary_weight(u[j]) * boundary_weight(v[j]);
    }
    score_dot += a * b;
    cross += (a - b) * delta;
    dist2 += delta * delta;
  }
  const double k = weight * std::exp(-0.5 * dist2 * inv_s2_);
  const double trace = static_cast<double>(d) * inv_s2_ - dist2 * inv_s2_ * inv_s2_;
  return k * (score_dot + cross * inv_s2_ + trace);
}

double SteinKernelEvaluator::pair_diag(std::span<const double> u, std::span<const double> su) const {
  const bool weighted = base_.kind == BaseKernelKind::WeightedRBF;
  double norm2 = 0.0;
  double weight = 1.0;
  for (std::size_t j = 0; j < su.size(); ++j) {
    double a = su[j];
    if (weighted) {
      a += boundary_log_slope(u[j]);
      const double w = boundary_weight(u[j]);
      weight *= w * w;
    }
    norm2 += a * a;
  }
  return weight * (norm2 + static_cast<double>(su.size()) * inv_s2_);
}

double SteinKernelEvaluator::operator()(std::span<const double> u, std::span<const double> v) const {
  if (static_cast<int>(u.size()) != dim() || static_cast<int>(v.size()) != dim()) {
    throw ParameterError("stein kernel: point dimension does not match the model");
  }
  std::vector<double> cu(u.begin(), u.end()), cv(v.begin(), v.end());
  clamp_point(cu, clamp_eps_);
  clamp_point(cv, clamp_eps_);
  std::vector<double> su(cu.size()), sv(cv.size());
  score_into(model_, cu, su);
  score_into(model_, cv, sv);
  return pair(cu, su, cv, sv);
}

double SteinKernelEvaluator::diag(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) throw ParameterError("stein kernel: point dimension does not match the model");
  std::vector<double> cu(u.begin(), u.end());
  clamp_point(cu, clamp_eps_);
  std::vector<double> su(cu.size());
  score_into(model_, cu, su);
  return pair_diag(cu, su);
}

ScoredSample SteinKernelEvaluator::prepare(const PointMatrix& points, int threads) const {
  if (static_cast<int>(points.cols()) != dim()) {
    throw ParameterError("sample dimension does not match the model dimension");
  }
  const std::size_t n = points.rows();
  const double eps = std::max(clamp_eps_, clamp_eps_for(n));
  ScoredSample out{points, PointMatrix(n, points.cols()), 0};
  constexpr std::size_t kChunk = 256;
  const std::size_t tasks = (n + kChunk - 1) / kChunk;
  std::vector<std::size_t> clamped(tasks, 0);
  run_tasks(tasks, threads, [&](std::size_t t) {
    const std::size_t hi = std::min(n, (t + 1) * kChunk);
    for (std::size_t i = t * kChunk; i < hi; ++i) {
      clamped[t] += clamp_point(out.points.row(i), eps);
      score_into(model_, out.points.row(i), out.scores.row(i));
    }
  });
  for (std::size_t c : clamped) out.clamped += c;
  return out;
}

}  // namespace csd
