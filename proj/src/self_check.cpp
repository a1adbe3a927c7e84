#include "csd/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "csd/estimator.hpp"
#include "csd/finite_difference.hpp"
#include "csd/random_features.hpp"
#include "csd/rng.hpp"
#include "csd/sampling.hpp"

namespace csd {

namespace {

std::vector<double> checked_score(const CopulaModel& model, std::span<const double> u, bool flip) {
  std::vector<double> s = score(model, u).values;
  if (flip) {
    if (const auto* a = std::get_if<ArchimedeanModel>(&model.variant())) {
      for (std::size_t j = 0; j < s.size(); ++j) s[j] -= 2.0 * phi_curvature(a->generator, u[j]);
    }
  }
  return s;
}

CheckResult score_vs_fd(const SelfCheckOptions& opt) {
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0;
  const std::vector<CopulaModel> models = {
      CopulaModel::archimedean({Family::Clayton, 2.0}, 3),
      CopulaModel::archimedean({Family::Gumbel, 1.7}, 3),
      CopulaModel::archimedean({Family::Frank, 4.0}, 3),
      CopulaModel::gaussian(sigma),
      CopulaModel::mixture({0.4, 0.6}, {CopulaModel::archimedean({Family::Clayton, 1.0}, 3),
                                        CopulaModel::archimedean({Family::Gumbel, 2.0}, 3)}),
  };
  Philox rng(opt.seed);
  double worst = 0.0;
  for (const auto& m : models) {
    for (int p = 0; p < 20; ++p) {
      std::vector<double> u(3);
      for (double& x : u) x = rng.uniform(0.05, 0.95);
      const auto s = checked_score(m, u, opt.inject_generator_sign_flip);
      const auto fd = fd_score(m, u);
      double diff = 0.0, scale = 1.0;
      for (std::size_t j = 0; j < u.size(); ++j) {
        diff = std::max(diff, std::abs(s[j] - fd[j]));
        scale = std::max(scale, std::abs(fd[j]));
      }
      worst = std::max(worst, diff / scale);
    }
  }
  return {"score_vs_finite_differences", worst < 1e-5, worst, 1e-5, "5 models x 20 points, d=3"};
}

CheckResult kernel_vs_bruteforce(const SelfCheckOptions& opt) {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  Philox rng(opt.seed + 1);
  double worst = 0.0;
  for (BaseKernelKind kind : {BaseKernelKind::GaussianRBF, BaseKernelKind::WeightedRBF}) {
    const BaseKernelSpec base{kind, 0.4};
    const SteinKernelEvaluator eval(model, base);
    for (int p = 0; p < 10; ++p) {
      std::vector<double> u(2), v(2);
      for (double& x : u) x = rng.uniform(0.05, 0.95);
      for (double& x : v) x = rng.uniform(0.05, 0.95);
      const auto su = checked_score(model, u, opt.inject_generator_sign_flip);
      const auto sv = checked_score(model, v, opt.inject_generator_sign_flip);
      const double k = eval.pair(u, su, v, sv);
      const SteinTerms t = fd_stein_kernel(model, base, u, v);
      worst = std::max(worst, std::abs(k - t.total()) / std::max(std::abs(t.total()), 1.0));
    }
  }
  return {"stein_kernel_vs_bruteforce", worst < 1e-4, worst, 1e-4, "Clayton theta=2, d=2, 10 pairs per base kernel"};
}

CheckResult streaming_vs_naive(const SelfCheckOptions& opt) {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  const PseudoSample s = sample({model, 200, opt.seed + 2});
  const SteinKernelEvaluator eval(model, BaseKernelSpec{BaseKernelKind::WeightedRBF, median_bandwidth(s.points)});
  const ScoredSample scored = eval.prepare(s.points);
  const double naive = csd_v_statistic(scored, eval).csd_sq;
  const double streamed = csd_streaming(scored, eval, 7).csd_sq;
  const double rel = std::abs(naive - streamed) / std::abs(naive);
  return {"streaming_vs_naive", rel < 1e-12, rel, 1e-12, "n=200, block=7"};
}

CheckResult rf_unbiasedness(const SelfCheckOptions& opt) {
  const CopulaModel model = CopulaModel::archimedean({Family::Clayton, 2.0}, 2);
  const PseudoSample s = sample({model, 10, opt.seed + 3});
  const double sigma = 0.5;
  const SteinKernelEvaluator eval(model, BaseKernelSpec{BaseKernelKind::WeightedRBF, sigma});
  const double exact = csd_v_statistic(s, eval).csd_sq;
  const int bases = 300;
  double mean = 0.0, m2 = 0.0;
  for (int b = 0; b < bases; ++b) {
    const double x = rf_csd(s, model, draw_basis(64, 2, sigma, derive_seed(opt.seed, b), BaseKernelKind::WeightedRBF)).csd_sq;
    const double delta = x - mean;
    mean += delta / (b + 1);
    m2 += delta * (x - mean);
  }
  const double se = std::sqrt(m2 / (bases - 1) / bases);
  const double z = std::abs(mean - exact) / se;
  std::ostringstream os;
  os << "exact=" << exact << " rf_mean=" << mean << " se=" << se;
  return {"random_feature_unbiasedness", z < 4.0, z, 4.0, os.str()};
}

}  // namespace

std::vector<CheckResult> run_self_check(const SelfCheckOptions& options) {
  return {score_vs_fd(options), kernel_vs_bruteforce(options), streaming_vs_naive(options),
          rf_unbiasedness(options)};
}

}  // namespace csd
