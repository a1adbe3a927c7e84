#include "csd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <variant>

#include "csd/normal.hpp"

namespace csd {

namespace {

void sample_archimedean(const ArchimedeanModel& m, std::span<double> out, Philox& rng) {
  const GeneratorSpec& g = m.generator;
  double frailty = 1.0;
  switch (g.family) {
    case Family::Clayton:
      // Laplace transform (1 + theta t)^{-1/theta}: Gamma(1/theta, scale theta).
      frailty = g.theta * rng.gamma(1.0 / g.theta);
      break;
    case Family::Gumbel:
      frailty = positive_stable(1.0 / g.theta, rng);
      break;
    case Family::Frank:
      if (g.theta < 0.0) throw UnsupportedError("frailty sampling requires Frank theta > 0");
      frailty = static_cast<double>(logarithmic_series(-std::expm1(-g.theta), rng));
      break;
    case Family::Independence:
      for (double& x : out) x = rng.uniform();
      return;
  }
  for (double& x : out) x = psi(g, rng.exponential() / frailty);
}

void sample_gaussian(const GaussianModel& m, std::span<double> out, Philox& rng) {
  const Eigen::Index d = m.sigma.rows();
  Eigen::VectorXd z(d);
  for (Eigen::Index j = 0; j < d; ++j) z[j] = rng.normal();
  const Eigen::VectorXd x = m.cholesky_lower * z;
  for (Eigen::Index j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] = normal_cdf(x[j]);
}

void sample_row(const CopulaModel& model, std::span<double> out, Philox& rng) {
  const auto& v = model.variant();
  if (const auto* a = std::get_if<ArchimedeanModel>(&v)) {
    sample_archimedean(*a, out, rng);
  } else if (const auto* g = std::get_if<GaussianModel>(&v)) {
    sample_gaussian(*g, out, rng);
  } else {
    const auto& mix = std::get<MixtureModel>(v);
    const double r = rng.uniform();
    double cum = 0.0;
    std::size_t k = 0;
    for (; k + 1 < mix.weights.size(); ++k) {
      cum += mix.weights[k];
      if (r < cum) break;
    }
    sample_row(mix.components[k], out, rng);
  }
}

/// Counts discordant pairs while merge-sorting `v` (i.e. inversions), O(n log n).
std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      buf[k++] = v[b++];
      swaps += mid - a;
    } else {
      buf[k++] = v[a++];
    }
  }
  while (a < mid) buf[k++] = v[a++];
  while (b < hi) buf[k++] = v[b++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

/// Number of tied pairs in a sorted sequence.
template <class Eq>
std::uint64_t tied_pairs(std::size_t n, Eq&& equal) {
  std::uint64_t ties = 0, run = 1;
  for (std::size_t k = 1; k < n; ++k) {
    if (equal(k - 1, k)) {
      ++run;
    } else {
      ties += run * (run - 1) / 2;
      run = 1;
    }
  }
  return ties + run * (run - 1) / 2;
}

double bisect(double lo, double hi, double target, double (*f)(double)) {
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double positive_stable(double alpha, Philox& rng) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("positive stable index must lie in (0, 1]");
  if (alpha == 1.0) return 1.0;
  const double theta = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  const double a = std::pow(std::sin(alpha * theta), alpha / (1.0 - alpha)) *
                   std::sin((1.0 - alpha) * theta) / std::pow(std::sin(theta), 1.0 / (1.0 - alpha));
  return std::pow(a / w, (1.0 - alpha) / alpha);
}

std::uint64_t logarithmic_series(double p, Philox& rng) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("logarithmic series requires p in (0,1)");
  const double v = rng.uniform();
  if (v >= p) return 1;
  const double q = -std::expm1(rng.uniform() * std::log1p(-p));
  if (v <= q * q) {
    const double k = std::floor(1.0 + std::log(v) / std::log(q));
    return k < 1.0 ? 1 : static_cast<std::uint64_t>(std::min(k, 9.0e18));
  }
  return v <= q ? 2 : 1;
}

PointMatrix sample_points(const CopulaModel& model, std::size_t n, Philox& rng) {
  PointMatrix out(n, static_cast<std::size_t>(model.dim()));
  for (std::size_t i = 0; i < n; ++i) sample_row(model, out.row(i), rng);
  return out;
}

PseudoSample sample(const SamplerConfig& config) {
  if (config.n == 0) throw ParameterError("sample size must be at least 1");
  Philox rng(config.seed);
  return direct_sample(sample_points(config.model, config.n, rng));
}

double kendall_tau(const PointMatrix& sample, std::size_t ci, std::size_t cj) {
  const std::size_t n = sample.rows();
  if (n < 2) throw DegenerateError("Kendall's tau needs at least two rows");
  if (ci >= sample.cols() || cj >= sample.cols()) throw ParameterError("Kendall's tau: column out of range");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double xa = sample(a, ci), xb = sample(b, ci);
    if (xa != xb) return xa < xb;
    return sample(a, cj) < sample(b, cj);
  });
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = sample(order[k], ci);
    y[k] = sample(order[k], cj);
  }
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tx = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t txy =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });
  std::vector<double> buf(n);
  const std::uint64_t discordant = merge_count(y, buf, 0, n);
  const std::uint64_t ty = tied_pairs(n, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });
  if (tx == n0 || ty == n0) throw DegenerateError("Kendall's tau: a column is constant");
  // Knight: concordant - discordant = n0 - tx - ty + txy - 2 * discordant.
  const double num = static_cast<double>(n0) - static_cast<double>(tx) - static_cast<double>(ty) +
                     static_cast<double>(txy) - 2.0 * static_cast<double>(discordant);
  const double den = std::sqrt(static_cast<double>(n0 - tx)) * std::sqrt(static_cast<double>(n0 - ty));
  return std::clamp(num / den, -1.0, 1.0);
}

double clayton_tau(double theta) { return theta / (theta + 2.0); }
double gumbel_tau(double theta) { return 1.0 - 1.0 / theta; }

double clayton_theta_for_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("Clayton tau must lie in (0,1)");
  double hi = 1.0;
  while (clayton_tau(hi) < tau) hi *= 2.0;
  return bisect(0.0, hi, tau, &clayton_tau);
}

double gumbel_theta_for_tau(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw ParameterError("Gumbel tau must lie in [0,1)");
  double hi = 2.0;
  while (gumbel_tau(hi) < tau) hi *= 2.0;
  return bisect(1.0, hi, tau, &gumbel_tau);
}

}  // namespace csd
