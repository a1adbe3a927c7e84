#include "csd/random_features.hpp"

#include <cmath>
#include <numbers>

#include "csd/rng.hpp"

namespace csd {

FeatureBasis draw_basis(std::size_t m, std::size_t d, double sigma, std::uint64_t seed, BaseKernelKind kind) {
  if (m == 0 || d == 0) throw ParameterError("random feature basis needs m >= 1 and d >= 1");
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw ParameterError("bandwidth must be finite and positive");
  FeatureBasis basis{m, d, sigma, seed, kind, std::vector<double>(m * d), std::vector<double>(m)};
  Philox rng(seed);
  for (double& w : basis.W) w = rng.normal() / sigma;
  for (double& b : basis.b) b = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return basis;
}

std::vector<double> feature_map(const FeatureBasis& basis, std::span<const double> u) {
  if (u.size() != basis.d) throw ParameterError("feature_map: dimension mismatch");
  const double scale = std::sqrt(2.0 / static_cast<double>(basis.m));
  double weight = 1.0;
  if (basis.kind == BaseKernelKind::WeightedRBF) {
    for (double x : u) weight *= boundary_weight(x);
  }
  std::vector<double> phi(basis.m);
  for (std::size_t r = 0; r < basis.m; ++r) {
    double z = basis.b[r];
    for (std::size_t j = 0; j < basis.d; ++j) z += basis.W[r * basis.d + j] * u[j];
    phi[r] = weight * scale * std::cos(z);
  }
  return phi;
}

namespace {

void fill_stein_feature(const FeatureBasis& basis, std::span<const double> u, std::span<const double> s_u,
                        std::span<double> g) {
  // Weighted: G = W(u) [J + phi (s + grad log W)'].
  double scale = std::sqrt(2.0 / static_cast<double>(basis.m));
  const std::size_t d = basis.d;
  double shift[kMaxDimension];
  for (std::size_t j = 0; j < d; ++j) shift[j] = s_u[j];
  if (basis.kind == BaseKernelKind::WeightedRBF) {
    for (std::size_t j = 0; j < d; ++j) {
      scale *= boundary_weight(u[j]);
      shift[j] += boundary_log_slope(u[j]);
    }
  }
  for (std::size_t r = 0; r < basis.m; ++r) {
    const double* w = basis.W.data() + r * d;
    double z = basis.b[r];
    for (std::size_t j = 0; j < d; ++j) z += w[j] * u[j];
    const double phi = scale * std::cos(z);
    const double dphi = -scale * std::sin(z);
    for (std::size_t j = 0; j < d; ++j) g[r * d + j] = dphi * w[j] + phi * shift[j];
  }
}

}  // namespace

PointMatrix stein_feature(const FeatureBasis& basis, std::span<const double> u, std::span<const double> s_u) {
  if (u.size() != basis.d || s_u.size() != basis.d) throw ParameterError("stein_feature: dimension mismatch");
  PointMatrix g(basis.m, basis.d);
  fill_stein_feature(basis, u, s_u, g.data());
  return g;
}

SteinFeatureAccumulator::SteinFeatureAccumulator(std::size_t m, std::size_t d)
    : m_(m), d_(d), sum_(m * d, 0.0), comp_(m * d, 0.0) {}

void SteinFeatureAccumulator::add_entry(std::size_t k, double x) {
  const double y = x - comp_[k];
  const double t = sum_[k] + y;
  comp_[k] = (t - sum_[k]) - y;
  sum_[k] = t;
}

void SteinFeatureAccumulator::add(const PointMatrix& g) {
  if (g.rows() != m_ || g.cols() != d_) throw ParameterError("accumulator: feature matrix shape mismatch");
  for (std::size_t k = 0; k < sum_.size(); ++k) add_entry(k, g.data()[k]);
  ++count_;
}

void SteinFeatureAccumulator::add_point(const FeatureBasis& basis, std::span<const double> u,
                                        std::span<const double> s_u) {
  if (basis.m != m_ || basis.d != d_) throw ParameterError("accumulator: basis shape mismatch");
  scratch_.resize(m_ * d_);
  fill_stein_feature(basis, u, s_u, scratch_);
  for (std::size_t k = 0; k < sum_.size(); ++k) add_entry(k, scratch_[k]);
  ++count_;
}

void SteinFeatureAccumulator::merge(const SteinFeatureAccumulator& other) {
  if (other.m_ != m_ || other.d_ != d_) throw ParameterError("accumulator: merge shape mismatch");
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    add_entry(k, other.sum_[k]);
    add_entry(k, -other.comp_[k]);
  }
  count_ += other.count_;
}

std::vector<double> SteinFeatureAccumulator::values() const {
  std::vector<double> v(sum_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = sum_[k] - comp_[k];
  return v;
}

double SteinFeatureAccumulator::squared_norm() const {
  CompensatedSum s;
  for (double x : values()) s.add(x * x);
  return s.value();
}

CsdEstimate rf_csd(const PseudoSample& sample, const CopulaModel& model, const FeatureBasis& basis,
                   const ExecutionPolicy& policy) {
  const std::size_t n = sample.size();
  if (n == 0) throw ParameterError("random-feature CSD requires a nonempty sample");
  if (sample.dim() != basis.d || static_cast<int>(basis.d) != model.dim()) {
    throw ParameterError("random-feature CSD: sample, basis and model dimensions differ");
  }
  constexpr std::size_t kChunk = 256;
  const std::size_t tasks = (n + kChunk - 1) / kChunk;
  std::vector<SteinFeatureAccumulator> partial(tasks, SteinFeatureAccumulator(basis.m, basis.d));
  const double eps = std::max(kMinClampEps, clamp_eps_for(n));
  CompensatedSum diag;
  std::vector<double> diag_parts(tasks, 0.0);
  run_tasks(tasks, policy.threads, [&](std::size_t t) {
    std::vector<double> u(basis.d), s(basis.d);
    CompensatedSum local;
    const std::size_t hi = std::min(n, (t + 1) * kChunk);
    for (std::size_t i = t * kChunk; i < hi; ++i) {
      const auto row = sample.points.row(i);
      std::copy(row.begin(), row.end(), u.begin());
      clamp_point(u, eps);
      score_into(model, u, s);
      partial[t].add_point(basis, u, s);
      double s2 = 0.0;
      double w2 = 1.0;
      for (std::size_t j = 0; j < basis.d; ++j) {
        double a = s[j];
        if (basis.kind == BaseKernelKind::WeightedRBF) {
          a += boundary_log_slope(u[j]);
          w2 *= boundary_weight(u[j]) * boundary_weight(u[j]);
        }
        s2 += a * a;
      }
      local.add(w2 * (s2 + static_cast<double>(basis.d) / (basis.sigma * basis.sigma)));
    }
    diag_parts[t] = local.value();
  });
  // Chunks always merge in index order; the merge is associative up to rounding.
  SteinFeatureAccumulator total(basis.m, basis.d);
  for (std::size_t t = 0; t < tasks; ++t) {
    total.merge(partial[t]);
    diag.add(diag_parts[t]);
  }
  CsdEstimate e;
  e.n = n;
  e.method = CsdMethod::RandomFeature;
  e.csd_sq = total.squared_norm() / (static_cast<double>(n) * static_cast<double>(n));
  // Exact k_C(u, u), not its feature approximation.
  e.diag_mean = diag.value() / static_cast<double>(n);
  e.seed = basis.seed;
  return e;
}

}  // namespace csd
