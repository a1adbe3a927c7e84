#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csd/base_kernel.hpp"
#include "csd/copula_model.hpp"
#include "csd/estimator.hpp"

namespace csd {

/// Random Fourier features phi(u) = sqrt(2/m) cos(W u + b) for the RBF kernel of width sigma.
/// For the weighted kernel the features are W(u) phi(u).
struct FeatureBasis {
  std::size_t m = 0;
  std::size_t d = 0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  BaseKernelKind kind = BaseKernelKind::GaussianRBF;
  std::vector<double> W;  // m x d, row-major
  std::vector<double> b;  // m phases in [0, 2 pi)
};

/// W_rj ~ N(0, sigma^-2), b_r ~ U[0, 2 pi); a pure function of (m, d, sigma, seed).
FeatureBasis draw_basis(std::size_t m, std::size_t d, double sigma, std::uint64_t seed,
                        BaseKernelKind kind = BaseKernelKind::GaussianRBF);

/// phi(u), length m.
std::vector<double> feature_map(const FeatureBasis& basis, std::span<const double> u);

/// Stein feature matrix G = J + phi s', with J = -sqrt(2/m) diag(sin z) W and z = W u + b.
/// Returned as an m x d row-major matrix.
PointMatrix stein_feature(const FeatureBasis& basis, std::span<const double> u, std::span<const double> s_u);

/// Running sum of vec(G) over points, with Kahan compensation per entry.
class SteinFeatureAccumulator {
 public:
  SteinFeatureAccumulator(std::size_t m, std::size_t d);

  /// Adds one Stein feature matrix (m x d).
  void add(const PointMatrix& g);
  /// Forms G for (u, s_u) in place and adds it without allocating.
  void add_point(const FeatureBasis& basis, std::span<const double> u, std::span<const double> s_u);
  /// Associative merge of another partial accumulator.
  void merge(const SteinFeatureAccumulator& other);

  std::size_t count() const { return count_; }
  /// Compensated value of M.
  std::vector<double> values() const;
  double squared_norm() const;

 private:
  std::size_t m_, d_;
  std::vector<double> sum_;
  std::vector<double> comp_;
  std::size_t count_ = 0;
  std::vector<double> scratch_;

  void add_entry(std::size_t k, double x);
};

/// csd_sq = |sum_i vec G(U_i)|^2 / n^2 in O(n m d) time and O(m d) memory.
CsdEstimate rf_csd(const PseudoSample& sample, const CopulaModel& model, const FeatureBasis& basis,
                   const ExecutionPolicy& policy = {});

}  // namespace csd
