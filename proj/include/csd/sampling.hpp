#pragma once

#include <cstdint>

#include "csd/copula_model.hpp"
#include "csd/estimator.hpp"
#include "csd/rng.hpp"

namespace csd {

struct SamplerConfig {
  CopulaModel model;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// Exact draws from the model, returned as a Direct pseudo-sample.
///   Archimedean: Marshall-Olkin frailty, U_j = psi(E_j / V).
///   Gaussian: Cholesky factor and the normal CDF.
///   Mixture: categorical component draw per row.
PseudoSample sample(const SamplerConfig& config);

/// Raw draws without clamping; consumes `rng`.
PointMatrix sample_points(const CopulaModel& model, std::size_t n, Philox& rng);

/// Positive-stable variate with Laplace transform exp(-t^alpha), 0 < alpha <= 1 (Kanter / CMS).
double positive_stable(double alpha, Philox& rng);
/// Logarithmic-series variate, P(V = k) = p^k / (-k log(1 - p)), via Kemp's LK inversion.
std::uint64_t logarithmic_series(double p, Philox& rng);

/// Kendall's tau-b between columns i and j in O(n log n) (Knight's merge-sort algorithm).
double kendall_tau(const PointMatrix& sample, std::size_t i, std::size_t j);

/// Population Kendall's tau: Clayton theta/(theta+2), Gumbel 1 - 1/theta.
double clayton_tau(double theta);
double gumbel_tau(double theta);
/// Inverse maps, by bisection on the tau formulas to 1e-10.
double clayton_theta_for_tau(double tau);
double gumbel_theta_for_tau(double tau);

}  // namespace csd
