// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "csd/bench.hpp"
#include "csd/estimator.hpp"
#include "csd/finite_difference.hpp"
#include "csd/random_features.hpp"
#include "csd/rng.hpp"
#include "csd/sampling.hpp"

using namespace csd;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Moments {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / (n - 1) / n); }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Eigen::MatrixXd equicorrelation(int d, double rho) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(d, d, rho);
  s.diagonal().setOnes();
  return s;
}

Eigen::MatrixXd ar1(int d, double rho) {
  Eigen::MatrixXd s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return s;
}

std::vector<CopulaModel> model_panel(int d) {
  std::vector<CopulaModel> m;
  for (double t : {0.5, 2.0, 5.0}) m.push_back(CopulaModel::archimedean({Family::Clayton, t}, d));
  for (double t : {1.3, 2.0, 4.0}) m.push_back(CopulaModel::archimedean({Family::Gumbel, t}, d));
  for (double t : {1.0, 4.0, 8.0}) m.push_back(CopulaModel::archimedean({Family::Frank, t}, d));
  m.push_back(CopulaModel::gaussian(equicorrelation(d, 0.5)));
  m.push_back(CopulaModel::gaussian(ar1(d, -0.4)));
  m.push_back(CopulaModel::mixture({0.4, 0.6}, {CopulaModel::archimedean({Family::Clayton, 1.0}, d),
                                                CopulaModel::archimedean({Family::Gumbel, 2.0}, d)}));
  return m;
}

std::vector<double> interior_point(Philox& rng, int d) {
  std::vector<double> u(d);
  for (double& x : u) x = rng.uniform(0.05, 0.95);
  return u;
}

Outcome score_correctness() {
  Philox rng(101);
  double worst = 0.0;
  std::string where;
  for (int d : {2, 3, 5}) {
    for (const auto& model : model_panel(d)) {
      for (int p = 0; p < 100; ++p) {
        const auto u = interior_point(rng, d);
        const auto s = score(model, u).values;
        const auto fd = fd_score(model, u);
        for (int j = 0; j < d; ++j) {
          const double e = std::abs(s[j] - fd[j]) / std::max(std::abs(fd[j]), 1.0);
          if (e > worst) {
            worst = e;
            where = model.describe();
          }
        }
      }
    }
  }
  return {worst < 1e-5, fmt("max rel err %.3g (%s), 13 models x d in {2,3,5} x 100 points", worst, where.c_str())};
}

Outcome kernel_oracle() {
  Philox rng(202);
  double worst = 0.0;
  std::string where;
  int models = 0;
  for (int d : {2, 3}) {
    for (const auto& model : model_panel(d)) {
      ++models;
      for (BaseKernelKind kind : {BaseKernelKind::WeightedRBF, BaseKernelKind::GaussianRBF}) {
        const BaseKernelSpec base{kind, 0.4};
        const SteinKernelEvaluator eval(model, base);
        for (int p = 0; p < 100; ++p) {
          const auto u = interior_point(rng, d), v = interior_point(rng, d);
          const double k = eval(u, v);
          const SteinTerms t = fd_stein_kernel(model, base, u, v);
          const double e = std::abs(k - t.total()) / std::max(std::abs(t.total()), 1.0);
          if (e > worst) {
            worst = e;
            where = model.describe() + " " + to_string(kind);
          }
        }
      }
    }
  }
  return {worst < 1e-4, fmt("max rel err %.3g (%s), %d models x 2 kernels x 100 pairs", worst, where.c_str(), models)};
}

// Off-diagonal mean with the standard error of a degenerate U-statistic, sqrt(2 E[h^2] / (n (n - 1))).
struct OffDiagonal {
  double mean, se;
};
OffDiagonal off_diagonal(const PseudoSample& s, const SteinKernelEvaluator& eval) {
  const ScoredSample sc = eval.prepare(s.points);
  const std::size_t n = sc.size();
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = eval.pair(sc.points.row(i), sc.scores.row(i), sc.points.row(j), sc.scores.row(j));
      sum += k;
      sum2 += k * k;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return {sum / pairs, std::sqrt(2.0 * (sum2 / pairs) / (2.0 * pairs))};
}

const std::vector<CopulaModel>& null_models() {
  static const std::vector<CopulaModel> m = {CopulaModel::archimedean({Family::Clayton, 2.0}, 2),
                                             CopulaModel::archimedean({Family::Gumbel, 2.0}, 3),
                                             CopulaModel::gaussian(equicorrelation(2, 0.5))};
  return m;
}

Outcome zero_mean(BaseKernelKind kind) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < null_models().size(); ++i) {
    const auto& model = null_models()[i];
    const PseudoSample s = sample({model, 2000, derive_seed(303, i)});
    const SteinKernelEvaluator eval(model, {kind, median_bandwidth(s.points)});
    const OffDiagonal o = off_diagonal(s, eval);
    const double z = o.mean / o.se;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("%s z=%.2f; ", model.describe().c_str(), z);
  }
  return {ok, detail + "n=2000, " + to_string(kind)};
}

Outcome mean_identity_rate() {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  std::vector<double> ns, means;
  bool ok = true;
  std::string detail;
  for (std::size_t n : {100, 200, 400, 800, 1600}) {
    Moments csd, diag, diff;
    for (int r = 0; r < 200; ++r) {
      const PseudoSample s = sample({model, n, derive_seed(4040, n * 1000 + r)});
      const SteinKernelEvaluator eval(model, {BaseKernelKind::WeightedRBF, median_bandwidth(s.points)});
      const CsdEstimate e = csd_v_statistic(s, eval);
      csd.add(e.csd_sq);
      diag.add(e.diag_mean / static_cast<double>(n));
      diff.add(e.csd_sq - e.diag_mean / static_cast<double>(n));
    }
    // Gate on the standard error of mean csd_sq; the paired z is printed for reference.
    const double z = (csd.mean - diag.mean) / csd.se();
    ok = ok && std::abs(z) <= 3.0;
    ns.push_back(static_cast<double>(n));
    means.push_back(csd.mean);
    detail += fmt("n=%zu z=%.2f (paired %.2f); ", n, z, diff.mean / diff.se());
  }
  const double slope = loglog_slope(ns, means);
  ok = ok && slope >= -1.15 && slope <= -0.85;
  return {ok, detail + fmt("slope %.3f", slope)};
}

Outcome streaming_equivalence() {
  const std::vector<std::size_t> sizes{1, 2, 33, 150, 600};
  double worst = 0.0;
  int configs = 0;
  for (std::size_t n : sizes) {
    for (std::size_t block : {std::size_t{1}, std::size_t{7}, std::size_t{64}, n}) {
      const CopulaModel& model = null_models()[configs % 3];
      const PseudoSample s = sample({model, n, derive_seed(505, configs)});
      const SteinKernelEvaluator eval(model, {BaseKernelKind::WeightedRBF, 0.3 + 0.05 * (configs % 5)});
      const double a = csd_v_statistic(s, eval).csd_sq;
      const double b = csd_streaming(s, eval, block).csd_sq;
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
      ++configs;
    }
  }
  return {worst < 1e-12, fmt("max rel diff %.3g over %d configurations", worst, configs)};
}

Outcome rf_unbiased() {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  const PseudoSample s = sample({model, 50, 606});
  const double sigma = 0.5;
  const double exact = csd_v_statistic(s, SteinKernelEvaluator(model, {BaseKernelKind::WeightedRBF, sigma})).csd_sq;
  bool ok = true;
  std::string detail = fmt("exact %.4g; ", exact);
  for (std::size_t m : {64, 512}) {
    Moments mo;
    for (int b = 0; b < 400; ++b) {
      mo.add(rf_csd(s, model, draw_basis(m, 2, sigma, derive_seed(6060 + m, b), BaseKernelKind::WeightedRBF)).csd_sq);
    }
    const double z = (mo.mean - exact) / mo.se();
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("m=%zu z=%.2f; ", m, z);
  }
  double prev = INFINITY;
  for (std::size_t m : {64, 256, 1024, 4096}) {
    std::vector<double> err;
    for (int b = 0; b < 100; ++b) {
      const double x =
          rf_csd(s, model, draw_basis(m, 2, sigma, derive_seed(7070 + m, b), BaseKernelKind::WeightedRBF)).csd_sq;
      err.push_back(std::abs(x - exact) / exact);
    }
    const double med = median(err);
    ok = ok && med < prev;
    prev = med;
    detail += fmt("med err m=%zu %.3g; ", m, med);
  }
  return {ok, detail};
}

Outcome bootstrap_level() {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  const int reps = 500;
  std::vector<double> p;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t seed = derive_seed(707, r);
    const PseudoSample s = sample({model, 300, seed});
    const SteinKernelEvaluator eval(model, {BaseKernelKind::WeightedRBF, median_bandwidth(s.points)});
    const TestReport rep = wild_bootstrap_test(s, eval, {500, 0.05, derive_seed(seed, 1)});
    rejections += rep.reject ? 1 : 0;
    p.push_back(rep.p_value);
  }
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  for (int i = 0; i < reps; ++i) {
    ks = std::max({ks, static_cast<double>(i + 1) / reps - p[i], p[i] - static_cast<double>(i) / reps});
  }
  const double rate = static_cast<double>(rejections) / reps;
  return {rate >= 0.02 && rate <= 0.08 && ks < 0.1, fmt("rejection rate %.3f, KS %.3f", rate, ks)};
}

Outcome tail_power() {
  const CopulaModel target = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  const double tau = clayton_tau(2.0);
  const CopulaModel alt = CopulaModel::archimedean({Family::Gumbel, gumbel_theta_for_tau(tau)}, 2);
  PowerConfig pc{target, {alt}, 500, 200, 500, 0.05, 808};
  const PowerRow row = run_power(pc).front();

  std::vector<double> dl, mean_csd;
  const double sigma = 0.5;
  for (double theta : {0.5, 1.0, 2.0, 4.0}) {
    const CopulaModel data = CopulaModel::archimedean({Family::Clayton, theta}, 2);
    Moments mo;
    for (int r = 0; r < 30; ++r) {
      const PseudoSample s = sample({data, 500, derive_seed(809, static_cast<std::uint64_t>(theta * 100) * 1000 + r)});
      mo.add(csd_v_statistic(s, SteinKernelEvaluator(target, {BaseKernelKind::WeightedRBF, sigma})).csd_sq);
    }
    dl.push_back(std::abs(tail_lower(data) - tail_lower(target)));
    mean_csd.push_back(mo.mean);
  }
  const double rho = spearman(dl, mean_csd);
  std::string curve;
  for (double c : mean_csd) curve += fmt("%.3g ", c);
  return {row.rejection_rate > 0.5 && rho > 0.8,
          fmt("Gumbel(theta=%.3g) power %.3f; Spearman %.2f, mean csd [%s] for Clayton theta 0.5,1,2,4", gumbel_theta_for_tau(tau),
              row.rejection_rate, rho, curve.c_str())};
}

double slope_of(const std::vector<ScalingRow>& rows, bool by_d) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(static_cast<double>(by_d ? r.d : r.n));
    y.push_back(r.median_ms);
  }
  return loglog_slope(x, y);
}

Outcome complexity() {
  BenchGrid g;
  g.replicates = 5;
  g.methods = {"exact"};
  g.n_values = {400, 800, 1600, 3200};
  const double sn = slope_of(run_scaling(g), false);
  g.n_values = {800};
  g.d_values = {2, 4, 8, 16};
  const double sd = slope_of(run_scaling(g), true);
  g.methods = {"rf"};
  g.d_values = {2};
  g.m_values = {256};
  g.n_values = {2000, 4000, 8000, 16000, 32000};
  const double sr = slope_of(run_scaling(g), false);
  const bool ok = sn >= 1.7 && sn <= 2.3 && sd <= 1.4 && sr >= 0.8 && sr <= 1.3;
  return {ok, fmt("exact vs n %.2f, exact vs d %.2f, rf vs n %.2f", sn, sd, sr)};
}

Outcome determinism() {
  const CopulaModel model = CopulaModel::mixture(
      {0.3, 0.7}, {CopulaModel::gaussian(equicorrelation(3, 0.4)), CopulaModel::archimedean({Family::Frank, 3.0}, 3)});
  auto report = [&](int threads) {
    const PseudoSample s = sample({model, 400, 1010});
    const SteinKernelEvaluator eval(model, {BaseKernelKind::WeightedRBF, median_bandwidth(s.points)});
    const ExecutionPolicy pol{threads, true};
    const TestReport rep = wild_bootstrap_test(s, eval, {200, 0.05, 1011}, pol);
    return std::vector<double>{rep.estimate.csd_sq, rep.p_value, rep.bootstrap_stats.back(),
                               csd_streaming(s, eval, 64, pol).csd_sq,
                               rf_csd(s, model, draw_basis(128, 3, 0.4, 1012, BaseKernelKind::WeightedRBF), pol).csd_sq};
  };
  const auto a = report(1), b = report(1), c = report(4);
  return {a == b && a == c, fmt("csd_sq %.17g; rerun and 4-thread values identical: %s", a[0], a == b && a == c ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    bool gating = true;
  };
  const std::vector<Criterion> criteria = {
      {"1 score correctness", score_correctness},
      {"2 stein kernel oracle", kernel_oracle},
      {"3 zero mean off-diagonal", [] { return zero_mean(BaseKernelKind::WeightedRBF); }},
      {"3 (diagnostic, plain rbf)", [] { return zero_mean(BaseKernelKind::GaussianRBF); }, false},
      {"4 mean identity and 1/n rate", mean_identity_rate},
      {"5 streaming equivalence", streaming_equivalence},
      {"6 random feature unbiasedness", rf_unbiased},
      {"7 bootstrap level", bootstrap_level},
      {"8 tail dependence power", tail_power},
      {"9 complexity slopes", complexity},
      {"10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    const Outcome o = c.run();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const char* tag = c.gating ? (o.pass ? "PASS" : "FAIL") : (o.pass ? "INFO" : "INFO-FAIL");
    std::printf("%-10s %-32s %6.1fs  %s\n", tag, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (c.gating && !o.pass) ++failures;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
