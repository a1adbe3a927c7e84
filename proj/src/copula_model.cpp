#include "csd/copula_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "csd/common.hpp"
#include "csd/normal.hpp"

namespace csd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const CopulaModel& model, std::size_t size) {
  if (static_cast<int>(size) != model.dim()) {
    std::ostringstream os;
    os << "point has " << size << " coordinates, model dimension is " << model.dim();
    throw ParameterError(os.str());
  }
}

void archimedean_score(const ArchimedeanModel& m, std::span<const double> u, std::span<double> out) {
  if (m.generator.family == Family::Independence) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  double t = 0.0;
  for (double x : u) t += phi(m.generator, x);
  const double ratio = psi_ratio(m.generator, t, m.dim);
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] = phi_d1(m.generator, u[j]) * ratio + phi_curvature(m.generator, u[j]);
  }
}

double archimedean_log_density(const ArchimedeanModel& m, std::span<const double> u) {
  if (m.generator.family == Family::Independence) return 0.0;
  double t = 0.0;
  double log_jac = 0.0;
  for (double x : u) {
    t += phi(m.generator, x);
    log_jac += log_neg_phi_d1(m.generator, x);
  }
  // c(u) = psi^{(d)}(t) * prod phi'(u_k) = |psi^{(d)}(t)| * prod(-phi'(u_k)).
  const LogSignedValue deriv = psi_derivative(m.generator, t, m.dim);
  const int expected_sign = (m.dim % 2 == 0) ? 1 : -1;
  if (deriv.sign != expected_sign) {
    std::ostringstream os;
    os << "psi^(" << m.dim << ")(" << t << ") has the wrong sign; density would be negative";
    throw NumericError(os.str());
  }
  return deriv.log_abs + log_jac;
}

void gaussian_normals(std::span<const double> u, Eigen::VectorXd& z) {
  z.resize(static_cast<Eigen::Index>(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) z[static_cast<Eigen::Index>(j)] = normal_quantile(u[j]);
}

void gaussian_score(const GaussianModel& m, std::span<const double> u, std::span<double> out) {
  Eigen::VectorXd z;
  gaussian_normals(u, z);
  const Eigen::VectorXd pz = m.precision_minus_identity * z;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out[j] = -pz[jj] * std::exp(-normal_log_pdf(z[jj]));
  }
}

double gaussian_log_density(const GaussianModel& m, std::span<const double> u) {
  Eigen::VectorXd z;
  gaussian_normals(u, z);
  return -0.5 * z.dot(m.precision_minus_identity * z) - 0.5 * m.log_det;
}

double model_log_density(const CopulaModel& model, std::span<const double> u);

/// log-sum-exp of log(w_k) + log c_k(u); fills per-component responsibilities.
double mixture_log_density(const MixtureModel& m, std::span<const double> u, std::vector<double>* resp) {
  std::vector<double> logs(m.components.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m.components.size(); ++k) {
    logs[k] = std::log(m.weights[k]) + model_log_density(m.components[k], u);
    max_log = std::max(max_log, logs[k]);
  }
  if (!std::isfinite(max_log)) throw NumericError("mixture density underflows in log space");
  double total = 0.0;
  for (double l : logs) total += std::exp(l - max_log);
  if (resp) {
    resp->resize(logs.size());
    for (std::size_t k = 0; k < logs.size(); ++k) (*resp)[k] = std::exp(logs[k] - max_log) / total;
  }
  return max_log + std::log(total);
}

double model_log_density(const CopulaModel& model, std::span<const double> u) {
  return std::visit(Overloaded{
                        [&](const ArchimedeanModel& m) { return archimedean_log_density(m, u); },
                        [&](const GaussianModel& m) { return gaussian_log_density(m, u); },
                        [&](const MixtureModel& m) { return mixture_log_density(m, u, nullptr); },
                    },
                    model.variant());
}

}  // namespace

double clamp_eps_for(std::size_t n) {
  return std::max(kMinClampEps, 1.0 / (4.0 * static_cast<double>(std::max<std::size_t>(n, 1))));
}

std::size_t clamp_point(std::span<double> u, double eps) {
  std::size_t moved = 0;
  for (double& x : u) {
    if (std::isnan(x)) throw DomainError("point coordinate is NaN");
    if (x < eps) {
      x = eps;
      ++moved;
    } else if (x > 1.0 - eps) {
      x = 1.0 - eps;
      ++moved;
    }
  }
  return moved;
}

CopulaModel CopulaModel::archimedean(GeneratorSpec generator, int dim) {
  if (dim < 2 || dim > kMaxDimension) throw ParameterError("Archimedean model requires 2 <= d <= 64");
  GeneratorSpec g = generator.normalized();
  if (g.family == Family::Frank && g.theta < 0.0 && dim > 2) {
    throw ParameterError("Frank with negative theta is a valid copula only for d = 2");
  }
  return CopulaModel(ArchimedeanModel{g, dim});
}

CopulaModel CopulaModel::independence(int dim) {
  return archimedean(GeneratorSpec{Family::Independence, 0.0}, dim);
}

CopulaModel CopulaModel::gaussian(const Eigen::MatrixXd& sigma) {
  const Eigen::Index d = sigma.rows();
  if (d < 2 || sigma.cols() != d || d > kMaxDimension) {
    throw ParameterError("Gaussian sigma must be a square matrix with 2 <= d <= 64");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(sigma(i, i) - 1.0) > 1e-12) throw ParameterError("Gaussian sigma must have a unit diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12) throw ParameterError("Gaussian sigma must be symmetric");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw ParameterError("Gaussian sigma is not positive definite");
  GaussianModel m;
  m.sigma = sigma;
  m.cholesky_lower = llt.matrixL();
  m.precision_minus_identity = llt.solve(Eigen::MatrixXd::Identity(d, d)) - Eigen::MatrixXd::Identity(d, d);
  m.precision_minus_identity = 0.5 * (m.precision_minus_identity + m.precision_minus_identity.transpose()).eval();
  m.log_det = 2.0 * m.cholesky_lower.diagonal().array().log().sum();
  return CopulaModel(std::move(m));
}

CopulaModel CopulaModel::mixture(std::vector<double> weights, std::vector<CopulaModel> components) {
  if (weights.empty() || weights.size() != components.size()) {
    throw ParameterError("mixture needs one weight per component");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ParameterError("mixture weights must be strictly positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ParameterError("mixture weights must sum to 1");
  const int d = components.front().dim();
  for (const auto& c : components) {
    if (c.dim() != d) throw ParameterError("mixture components must share the same dimension");
  }
  return CopulaModel(MixtureModel{std::move(weights), std::move(components)});
}

int CopulaModel::dim() const {
  return std::visit(Overloaded{
                        [](const ArchimedeanModel& m) { return m.dim; },
                        [](const GaussianModel& m) { return static_cast<int>(m.sigma.rows()); },
                        [](const MixtureModel& m) { return m.components.front().dim(); },
                    },
                    model_);
}

bool CopulaModel::is_independence() const {
  return std::visit(Overloaded{
                        [](const ArchimedeanModel& m) { return m.generator.family == Family::Independence; },
                        [](const GaussianModel& m) { return m.precision_minus_identity.isZero(0.0); },
                        [](const MixtureModel& m) {
                          return std::all_of(m.components.begin(), m.components.end(),
                                             [](const CopulaModel& c) { return c.is_independence(); });
                        },
                    },
                    model_);
}

std::string CopulaModel::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ArchimedeanModel& m) {
                   os << to_string(m.generator.family);
                   if (m.generator.family != Family::Independence) os << "(theta=" << m.generator.theta << ", ";
                   else os << "(";
                   os << "d=" << m.dim << ")";
                 },
                 [&](const GaussianModel& m) { os << "gaussian(d=" << m.sigma.rows() << ")"; },
                 [&](const MixtureModel& m) {
                   os << "mixture[";
                   for (std::size_t k = 0; k < m.components.size(); ++k) {
                     if (k) os << ", ";
                     os << m.weights[k] << "*" << m.components[k].describe();
                   }
                   os << "]";
                 },
             },
             model_);
  return os.str();
}

void score_into(const CopulaModel& model, std::span<const double> u, std::span<double> out) {
  std::visit(Overloaded{
                 [&](const ArchimedeanModel& m) { archimedean_score(m, u, out); },
                 [&](const GaussianModel& m) { gaussian_score(m, u, out); },
                 [&](const MixtureModel& m) {
                   std::vector<double> resp;
                   mixture_log_density(m, u, &resp);
                   std::fill(out.begin(), out.end(), 0.0);
                   std::vector<double> comp(out.size());
                   for (std::size_t k = 0; k < m.components.size(); ++k) {
                     score_into(m.components[k], u, comp);
                     for (std::size_t j = 0; j < out.size(); ++j) out[j] += resp[k] * comp[j];
                   }
                 },
             },
             model.variant());
}

ScoreVector score(const CopulaModel& model, std::span<const double> u, double eps) {
  check_dim(model, u.size());
  std::vector<double> point(u.begin(), u.end());
  ScoreVector s;
  s.clamped = clamp_point(point, eps);
  s.values.resize(point.size());
  score_into(model, point, s.values);
  return s;
}

double log_density(const CopulaModel& model, std::span<const double> u, double eps) {
  check_dim(model, u.size());
  std::vector<double> point(u.begin(), u.end());
  clamp_point(point, eps);
  return model_log_density(model, point);
}

double tail_lower(const CopulaModel& model) {
  const auto* m = std::get_if<ArchimedeanModel>(&model.variant());
  if (m == nullptr) throw UnsupportedError("lower tail dependence is only provided for Archimedean models");
  switch (m->generator.family) {
    case Family::Clayton:
      return std::exp2(-1.0 / m->generator.theta);
    case Family::Gumbel:
    case Family::Frank:
      // Neither family has lower tail dependence.
      return 0.0;
    case Family::Independence:
      return 0.0;
  }
  return 0.0;
}

}  // namespace csd
