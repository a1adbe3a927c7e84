#include "csd/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>

#include "csd/rng.hpp"

namespace csd {

namespace {

/// Rows per reduction task. Fixed, so sums never depend on the thread count.
constexpr std::size_t kRowBlock = 32;

std::size_t row_blocks(std::size_t n) { return (n + kRowBlock - 1) / kRowBlock; }

/// Combines per-task partial sums either in task order or in completion order.
class PartialReducer {
 public:
  PartialReducer(std::size_t tasks, bool deterministic) : partials_(tasks, 0.0), deterministic_(deterministic) {}

  void put(std::size_t task, double value) {
    if (deterministic_) {
      partials_[task] = value;
    } else {
      std::lock_guard lock(mutex_);
      running_.add(value);
    }
  }

  double total() const {
    if (!deterministic_) return running_.value();
    CompensatedSum s;
    for (double p : partials_) s.add(p);
    return s.value();
  }

 private:
  std::vector<double> partials_;
  bool deterministic_;
  std::mutex mutex_;
  CompensatedSum running_;
};

void check_scored(const ScoredSample& scored, const SteinKernelEvaluator& eval) {
  if (scored.size() == 0) throw ParameterError("CSD requires a nonempty sample");
  if (static_cast<int>(scored.dim()) != eval.dim()) throw ParameterError("sample dimension does not match the model");
}

double diag_mean(const ScoredSample& s, const SteinKernelEvaluator& eval) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < s.size(); ++i) acc.add(eval.pair_diag(s.points.row(i), s.scores.row(i)));
  return acc.value() / static_cast<double>(s.size());
}

/// sum_{i in block} sum_j w_i w_j K_ij for one row block; K_ij from `kernel(i, j)`.
template <class KernelFn>
double weighted_block_sum(std::size_t block, std::size_t n, const std::int8_t* w, KernelFn&& kernel) {
  CompensatedSum acc;
  const std::size_t hi = std::min(n, (block + 1) * kRowBlock);
  for (std::size_t i = block * kRowBlock; i < hi; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = kernel(i, j);
      acc.add(w == nullptr ? x : static_cast<double>(w[i] * w[j]) * x);
    }
  }
  return acc.value();
}

}  // namespace

std::string to_string(CsdMethod m) {
  switch (m) {
    case CsdMethod::ExactVStat:
      return "exact";
    case CsdMethod::Streaming:
      return "streaming";
    case CsdMethod::RandomFeature:
      return "random_feature";
  }
  return "unknown";
}

PseudoSample direct_sample(PointMatrix points) {
  PseudoSample s;
  s.eps = clamp_eps_for(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) s.clamp_count += clamp_point(points.row(i), s.eps);
  s.points = std::move(points);
  s.source = SampleSource::Direct;
  return s;
}

PseudoSample pseudo_observations(const PointMatrix& raw) {
  const std::size_t n = raw.rows();
  const std::size_t d = raw.cols();
  if (n < 2) throw DegenerateError("pseudo-observations need at least two rows");
  if (d == 0) throw InputError("pseudo-observations need at least one column");
  PseudoSample s;
  s.points = PointMatrix(n, d);
  s.source = SampleSource::RanksOf;
  s.eps = clamp_eps_for(n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = raw(0, j), hi = raw(0, j);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = raw(i, j);
      if (std::isnan(x)) throw InputError("input contains NaN");
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (lo == hi) throw DegenerateError("column " + std::to_string(j + 1) + " is constant");
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw(a, j) < raw(b, j); });
    for (std::size_t r = 0; r < n; ++r) {
      s.points(order[r], j) = static_cast<double>(r + 1) / static_cast<double>(n + 1);
    }
  }
  return s;
}

CsdEstimate csd_v_statistic(const ScoredSample& scored, const SteinKernelEvaluator& eval,
                            const ExecutionPolicy& policy) {
  check_scored(scored, eval);
  const std::size_t n = scored.size();
  const std::size_t blocks = row_blocks(n);
  PartialReducer reducer(blocks, policy.deterministic);
  auto kernel = [&](std::size_t i, std::size_t j) {
    return eval.pair(scored.points.row(i), scored.scores.row(i), scored.points.row(j), scored.scores.row(j));
  };
  run_tasks(blocks, policy.threads,
            [&](std::size_t b) { reducer.put(b, weighted_block_sum(b, n, nullptr, kernel)); });
  CsdEstimate e;
  e.n = n;
  e.method = CsdMethod::ExactVStat;
  e.csd_sq = reducer.total() / (static_cast<double>(n) * static_cast<double>(n));
  e.diag_mean = diag_mean(scored, eval);
  return e;
}

CsdEstimate csd_v_statistic(const PseudoSample& sample, const SteinKernelEvaluator& eval,
                            const ExecutionPolicy& policy) {
  return csd_v_statistic(eval.prepare(sample.points, policy.threads), eval, policy);
}

double csd_u_statistic(const ScoredSample& scored, const SteinKernelEvaluator& eval, const ExecutionPolicy& policy) {
  check_scored(scored, eval);
  const std::size_t n = scored.size();
  if (n < 2) throw ParameterError("U-statistic requires n >= 2");
  const CsdEstimate v = csd_v_statistic(scored, eval, policy);
  const double nn = static_cast<double>(n);
  return (v.csd_sq * nn * nn - v.diag_mean * nn) / (nn * (nn - 1.0));
}

CsdEstimate csd_streaming(const ScoredSample& scored, const SteinKernelEvaluator& eval, std::size_t block,
                          const ExecutionPolicy& policy) {
  check_scored(scored, eval);
  if (block == 0) throw ParameterError("block size must be at least 1");
  const std::size_t n = scored.size();
  const std::size_t m = (n + block - 1) / block;
  // Upper-triangular block pairs (p, q >= p) in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(m * (m + 1) / 2);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p; q < m; ++q) pairs.emplace_back(p, q);

  PartialReducer reducer(pairs.size(), policy.deterministic);
  run_tasks(pairs.size(), policy.threads, [&](std::size_t task) {
    const auto [p, q] = pairs[task];
    const std::size_t i_hi = std::min((p + 1) * block, n);
    const std::size_t j_hi = std::min((q + 1) * block, n);
    KahanSum s;
    for (std::size_t i = p * block; i < i_hi; ++i) {
      const auto ui = scored.points.row(i);
      const auto si = scored.scores.row(i);
      for (std::size_t j = q * block; j < j_hi; ++j) {
        s.add(eval.pair(ui, si, scored.points.row(j), scored.scores.row(j)));
      }
    }
    reducer.put(task, p == q ? s.value() : 2.0 * s.value());
  });
  CsdEstimate e;
  e.n = n;
  e.method = CsdMethod::Streaming;
  e.csd_sq = reducer.total() / (static_cast<double>(n) * static_cast<double>(n));
  e.diag_mean = diag_mean(scored, eval);
  return e;
}

CsdEstimate csd_streaming(const PseudoSample& sample, const SteinKernelEvaluator& eval, std::size_t block,
                          const ExecutionPolicy& policy) {
  return csd_streaming(eval.prepare(sample.points, policy.threads), eval, block, policy);
}

PointMatrix stein_gram(const ScoredSample& scored, const SteinKernelEvaluator& eval, const ExecutionPolicy& policy) {
  check_scored(scored, eval);
  const std::size_t n = scored.size();
  PointMatrix gram(n, n);
  run_tasks(row_blocks(n), policy.threads, [&](std::size_t b) {
    const std::size_t hi = std::min(n, (b + 1) * kRowBlock);
    for (std::size_t i = b * kRowBlock; i < hi; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        gram(i, j) = eval.pair(scored.points.row(i), scored.scores.row(i), scored.points.row(j), scored.scores.row(j));
      }
    }
  });
  return gram;
}

TestReport wild_bootstrap_test(const PseudoSample& sample, const SteinKernelEvaluator& eval,
                               const BootstrapOptions& options, const ExecutionPolicy& policy) {
  const auto start = std::chrono::steady_clock::now();
  if (options.replicates < 100) throw ConfigError("wild bootstrap requires at least 100 replicates");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

  const ScoredSample scored = eval.prepare(sample.points, policy.threads);
  check_scored(scored, eval);
  const std::size_t n = scored.size();
  const std::size_t reps = static_cast<std::size_t>(options.replicates);
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const std::size_t blocks = row_blocks(n);

  std::vector<std::int8_t> weights(reps * n, 1);
  if (!options.force_unit_weights) {
    Philox rng(options.seed);
    for (auto& w : weights) w = static_cast<std::int8_t>(rng.rademacher());
  }

  TestReport report;
  report.alpha = options.alpha;
  report.bootstrap_seed = options.seed;
  report.bootstrap_stats.assign(reps, 0.0);

  const bool fits = static_cast<double>(n) * static_cast<double>(n) * sizeof(double) <=
                    static_cast<double>(options.memory_budget_bytes);
  report.gram_streamed = !fits;

  std::vector<double> partials(reps * blocks, 0.0);
  if (fits) {
    const PointMatrix gram = stein_gram(scored, eval, policy);
    auto kernel = [&](std::size_t i, std::size_t j) { return gram(i, j); };
    run_tasks(reps * blocks, policy.threads, [&](std::size_t task) {
      const std::size_t b = task / blocks;
      partials[task] = weighted_block_sum(task % blocks, n, weights.data() + b * n, kernel);
    });
  } else {
    // Recompute kernel rows for each row block and feed every replicate; per-replicate
    // accumulation order matches the in-memory path exactly.
    run_tasks(blocks, policy.threads, [&](std::size_t blk) {
      const std::size_t hi = std::min(n, (blk + 1) * kRowBlock);
      std::vector<CompensatedSum> acc(reps);
      std::vector<double> row(n);
      for (std::size_t i = blk * kRowBlock; i < hi; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          row[j] = eval.pair(scored.points.row(i), scored.scores.row(i), scored.points.row(j), scored.scores.row(j));
        }
        for (std::size_t b = 0; b < reps; ++b) {
          const std::int8_t* w = weights.data() + b * n;
          for (std::size_t j = 0; j < n; ++j) acc[b].add(static_cast<double>(w[i] * w[j]) * row[j]);
        }
      }
      for (std::size_t b = 0; b < reps; ++b) partials[b * blocks + blk] = acc[b].value();
    });
  }
  for (std::size_t b = 0; b < reps; ++b) {
    CompensatedSum s;
    for (std::size_t blk = 0; blk < blocks; ++blk) s.add(partials[b * blocks + blk]);
    report.bootstrap_stats[b] = s.value() / nn;
  }

  report.estimate = csd_v_statistic(scored, eval, ExecutionPolicy{policy.threads, true});
  std::size_t exceed = 0;
  for (double t : report.bootstrap_stats) exceed += (t >= report.estimate.csd_sq) ? 1 : 0;
  report.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(reps) + 1.0);
  report.reject = report.p_value <= options.alpha;
  report.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace csd
