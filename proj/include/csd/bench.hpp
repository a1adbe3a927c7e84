#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "csd/base_kernel.hpp"
#include "csd/copula_model.hpp"

namespace csd {

struct BenchGrid {
  std::vector<std::size_t> n_values{200, 400, 800, 1600};
  std::vector<std::size_t> d_values{2};
  std::vector<std::size_t> m_values{256};
  int replicates = 3;
  std::uint64_t seed = 1;
  /// Methods to time: "exact", "streaming", "rf".
  std::vector<std::string> methods{"exact", "rf"};
  /// Fixed bandwidth so timings do not include the median heuristic.
  double bandwidth = 0.5;
  BaseKernelKind kernel = BaseKernelKind::WeightedRBF;
  /// Cells whose first replicate exceeds this are marked skipped.
  double cell_budget_ms = 60000.0;
  std::size_t block = 64;
  /// Worker threads over cells; 1 keeps timings free of contention.
  int cell_threads = 1;

  void validate() const;
};

struct ScalingRow {
  std::size_t n = 0, d = 0, m = 0;
  std::string method;
  double median_ms = 0.0;
  double csd_sq = 0.0;
  std::uint64_t seed = 0;
  bool skipped = false;
};

/// Times every (method, n, d[, m]) cell of the grid on Clayton(theta=2) data.
/// Timings are medians over replicates; the sample seed of each cell is fixed
/// by (grid.seed, n, d) so csd values are reproducible.
std::vector<ScalingRow> run_scaling(const BenchGrid& grid);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);

struct PowerConfig {
  CopulaModel target;
  std::vector<CopulaModel> alternatives;
  std::size_t n = 500;
  int replicates = 200;
  int bootstrap = 200;
  double alpha = 0.05;
  std::uint64_t seed = 7;
  BaseKernelKind kernel = BaseKernelKind::WeightedRBF;
  /// Fixed bandwidth shared by every run; 0 selects the median heuristic per sample.
  double bandwidth = 0.0;
};

struct PowerRow {
  std::string alternative;
  double rejection_rate = 0.0;
  double standard_error = 0.0;
  double mean_csd = 0.0;
  double median_csd = 0.0;
  int replicates = 0;
};

/// Draws `replicates` samples from each alternative and runs the wild-bootstrap
/// test against the target.
std::vector<PowerRow> run_power(const PowerConfig& config);
void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace csd
