#include "csd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "csd/estimator.hpp"
#include "csd/parallel.hpp"
#include "csd/random_features.hpp"
#include "csd/rng.hpp"
#include "csd/sampling.hpp"

namespace csd {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

void BenchGrid::validate() const {
  auto positive = [](const std::vector<std::size_t>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](std::size_t x) { return x > 0; });
  };
  if (!positive(n_values) || !positive(d_values) || !positive(m_values)) {
    throw ConfigError("bench grid values must be positive");
  }
  if (replicates < 3) throw ConfigError("bench grid needs at least 3 replicates");
  if (!(bandwidth > 0.0)) throw ConfigError("bench bandwidth must be positive");
}

std::vector<ScalingRow> run_scaling(const BenchGrid& grid) {
  grid.validate();
  using Clock = std::chrono::steady_clock;
  std::vector<ScalingRow> rows;
  for (const std::string& method : grid.methods) {
    const bool rf = method == "rf";
    if (!rf && method != "exact" && method != "streaming") throw ConfigError("unknown bench method '" + method + "'");
    const std::vector<std::size_t> ms = rf ? grid.m_values : std::vector<std::size_t>{0};
    for (std::size_t d : grid.d_values) {
      for (std::size_t n : grid.n_values) {
        for (std::size_t m : ms) rows.push_back(ScalingRow{n, d, m, method, 0.0, 0.0, derive_seed(grid.seed, n * 1000 + d), false});
      }
    }
  }
  run_tasks(rows.size(), grid.cell_threads, [&](std::size_t c) {
    ScalingRow& row = rows[c];
    const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, static_cast<int>(row.d));
    const SteinKernelEvaluator eval(model, BaseKernelSpec{grid.kernel, grid.bandwidth});
    const PseudoSample s = sample({model, row.n, row.seed});
    std::vector<double> times;
    for (int r = 0; r < grid.replicates; ++r) {
      const auto t0 = Clock::now();
      CsdEstimate e;
      if (row.method == "rf") {
        e = rf_csd(s, model, draw_basis(row.m, row.d, grid.bandwidth, derive_seed(row.seed, row.m), grid.kernel));
      } else if (row.method == "streaming") {
        e = csd_streaming(s, eval, grid.block);
      } else {
        e = csd_v_statistic(s, eval);
      }
      times.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      row.csd_sq = e.csd_sq;
      if (r == 0 && times.back() > grid.cell_budget_ms) {
        row.skipped = true;
        break;
      }
    }
    row.median_ms = median(times);
  });
  return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "n,d,m,method,median_ms,csd_sq,seed,skipped\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << r.m << ',' << r.method << ',' << r.median_ms << ',' << r.csd_sq << ','
        << r.seed << ',' << (r.skipped ? 1 : 0) << '\n';
  }
}

std::vector<PowerRow> run_power(const PowerConfig& config) {
  std::vector<PowerRow> rows;
  for (std::size_t a = 0; a < config.alternatives.size(); ++a) {
    const CopulaModel& alt = config.alternatives[a];
    if (alt.dim() != config.target.dim()) throw ConfigError("alternative dimension differs from target");
    PowerRow row;
    row.alternative = alt.describe();
    row.replicates = config.replicates;
    int rejections = 0;
    std::vector<double> csd;
    for (int r = 0; r < config.replicates; ++r) {
      const std::uint64_t seed = derive_seed(config.seed, a * 1000003 + static_cast<std::uint64_t>(r));
      const PseudoSample s = sample({alt, config.n, seed});
      const SteinKernelEvaluator eval(config.target,
                                      BaseKernelSpec{config.kernel, config.bandwidth > 0.0 ? config.bandwidth : median_bandwidth(s.points)});
      const TestReport rep =
          wild_bootstrap_test(s, eval, BootstrapOptions{config.bootstrap, config.alpha, derive_seed(seed, 1)});
      rejections += rep.reject ? 1 : 0;
      csd.push_back(rep.estimate.csd_sq);
    }
    const double p = static_cast<double>(rejections) / config.replicates;
    row.rejection_rate = p;
    row.standard_error = std::sqrt(p * (1.0 - p) / config.replicates);
    row.mean_csd = std::accumulate(csd.begin(), csd.end(), 0.0) / static_cast<double>(csd.size());
    row.median_csd = median(csd);
    rows.push_back(row);
  }
  return rows;
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  out << "alternative,rejection_rate,standard_error,mean_csd,median_csd,replicates\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << '"' << r.alternative << "\"," << r.rejection_rate << ',' << r.standard_error << ',' << r.mean_csd << ','
        << r.median_csd << ',' << r.replicates << '\n';
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("spearman needs two or more points");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mean = 0.5 * static_cast<double>(x.size() + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace csd
