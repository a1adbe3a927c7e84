#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "csd/generators.hpp"

namespace csd {

/// Default lower clamp for incoming points; batch code uses max(1e-10, 1/(4n)).
inline constexpr double kMinClampEps = 1e-10;

/// max(1e-10, 1/(4n)).
double clamp_eps_for(std::size_t n);

/// Clamps every coordinate into [eps, 1 - eps]; returns how many were moved.
/// NaN coordinates raise DomainError.
std::size_t clamp_point(std::span<double> u, double eps);

class CopulaModel;

struct ArchimedeanModel {
  GeneratorSpec generator;
  int dim = 2;
};

struct GaussianModel {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd precision_minus_identity;
  Eigen::MatrixXd cholesky_lower;
  double log_det = 0.0;
};

struct MixtureModel {
  std::vector<double> weights;
  std::vector<CopulaModel> components;
};

/// Target dependence model: Archimedean family, Gaussian copula, or a finite
/// mixture of these. Immutable after construction.
class CopulaModel {
 public:
  using Variant = std::variant<ArchimedeanModel, GaussianModel, MixtureModel>;

  static CopulaModel archimedean(GeneratorSpec generator, int dim);
  static CopulaModel independence(int dim);
  /// sigma must be a symmetric positive definite correlation matrix.
  static CopulaModel gaussian(const Eigen::MatrixXd& sigma);
  /// Weights must be strictly positive and sum to 1 within 1e-12.
  static CopulaModel mixture(std::vector<double> weights, std::vector<CopulaModel> components);

  int dim() const;
  const Variant& variant() const { return model_; }
  /// Human-readable one-liner, e.g. "clayton(theta=2, d=2)".
  std::string describe() const;

  /// True when the score is identically zero.
  bool is_independence() const;

 private:
  explicit CopulaModel(Variant v) : model_(std::move(v)) {}
  Variant model_;
};

struct ScoreVector {
  std::vector<double> values;
  /// Number of coordinates clamped into [eps, 1 - eps] before evaluation.
  std::size_t clamped = 0;
};

/// s(u) = grad log c(u).
ScoreVector score(const CopulaModel& model, std::span<const double> u, double eps = kMinClampEps);

/// Allocation-free variant for hot loops: `u` is assumed already clamped and `out` sized d.
void score_into(const CopulaModel& model, std::span<const double> u, std::span<double> out);

/// log c(u); u is clamped into [eps, 1 - eps] first.
double log_density(const CopulaModel& model, std::span<const double> u, double eps = kMinClampEps);

/// Lower tail-dependence coefficient. Clayton: 2^{-1/theta}; Independence, Gumbel
/// and Frank: 0. Gaussian and mixture models raise UnsupportedError.
double tail_lower(const CopulaModel& model);

}  // namespace csd
