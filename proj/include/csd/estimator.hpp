#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csd/common.hpp"
#include "csd/parallel.hpp"
#include "csd/stein_kernel.hpp"

namespace csd {

enum class SampleSource { RanksOf, Direct };

/// n x d points inside [eps, 1 - eps]^d.
struct PseudoSample {
  PointMatrix points;
  SampleSource source = SampleSource::Direct;
  std::size_t clamp_count = 0;
  double eps = kMinClampEps;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
};

/// Uses the points as they are, clamping into [eps, 1 - eps] with eps = max(1e-10, 1/(4n)).
PseudoSample direct_sample(PointMatrix points);

/// Column-wise ranks divided by (n + 1). Ties are ordered by row index, so each
/// column is a permutation of {1, ..., n} / (n + 1).
PseudoSample pseudo_observations(const PointMatrix& raw);

enum class CsdMethod { ExactVStat, Streaming, RandomFeature };
std::string to_string(CsdMethod m);

struct CsdEstimate {
  double csd_sq = 0.0;
  std::size_t n = 0;
  CsdMethod method = CsdMethod::ExactVStat;
  /// Mean of k_C(U_i, U_i).
  double diag_mean = 0.0;
  std::optional<std::uint64_t> seed;
};

/// (1/n^2) sum_{i,j} k_C(U_i, U_j), diagonal included.
CsdEstimate csd_v_statistic(const PseudoSample& sample, const SteinKernelEvaluator& eval,
                            const ExecutionPolicy& policy = {});
CsdEstimate csd_v_statistic(const ScoredSample& scored, const SteinKernelEvaluator& eval,
                            const ExecutionPolicy& policy = {});

/// (1/(n(n-1))) sum_{i != j} k_C(U_i, U_j). Diagnostic only.
double csd_u_statistic(const ScoredSample& scored, const SteinKernelEvaluator& eval,
                       const ExecutionPolicy& policy = {});

/// Blocked evaluation: diagonal blocks once, off-diagonal blocks doubled,
/// Kahan-compensated accumulation. O(block * d) working memory on top of the sample.
CsdEstimate csd_streaming(const PseudoSample& sample, const SteinKernelEvaluator& eval, std::size_t block,
                          const ExecutionPolicy& policy = {});
CsdEstimate csd_streaming(const ScoredSample& scored, const SteinKernelEvaluator& eval, std::size_t block,
                          const ExecutionPolicy& policy = {});

/// Full n x n Stein Gram matrix.
PointMatrix stein_gram(const ScoredSample& scored, const SteinKernelEvaluator& eval,
                       const ExecutionPolicy& policy = {});

struct BootstrapOptions {
  int replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Gram matrices larger than this are never materialized.
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
  /// Test hook: every Rademacher weight is +1.
  bool force_unit_weights = false;
};

struct TestReport {
  CsdEstimate estimate;
  std::vector<double> bootstrap_stats;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::uint64_t bootstrap_seed = 0;
  double timing_ms = 0.0;
  bool gram_streamed = false;
};

/// Wild bootstrap with Rademacher multipliers: T*_b = (1/n^2) w' K w.
/// p = (1 + #{T* >= observed}) / (B + 1); reject iff p <= alpha.
TestReport wild_bootstrap_test(const PseudoSample& sample, const SteinKernelEvaluator& eval,
                               const BootstrapOptions& options, const ExecutionPolicy& policy = {});

}  // namespace csd
