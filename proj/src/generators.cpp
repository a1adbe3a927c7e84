#include "csd/generators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "csd/common.hpp"

namespace csd {

namespace {

void check_unit_interval(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    std::ostringstream os;
    os << "generator argument u=" << u << " is outside (0,1)";
    throw DomainError(os.str());
  }
}

void check_order(std::size_t order) {
  if (order > kMaxJetOrder) {
    std::ostringstream os;
    os << "jet order " << order << " exceeds the cap " << kMaxJetOrder;
    throw ParameterError(os.str());
  }
}

/// Half the distance from t to the nearest singularity of psi, capped at 1.
double expansion_step(const GeneratorSpec& g, double t) {
  double radius = std::numeric_limits<double>::infinity();
  switch (g.family) {
    case Family::Clayton:
      radius = t + 1.0 / g.theta;
      break;
    case Family::Gumbel:
      radius = t;
      break;
    case Family::Frank: {
      const double a = std::expm1(-g.theta);
      if (g.theta > 0.0) {
        radius = t - std::log(-a);
      } else {
        radius = std::hypot(t - std::log(a), std::numbers::pi);
      }
      break;
    }
    case Family::Independence:
      break;
  }
  return std::min(0.5 * radius, 1.0);
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::Clayton:
      return "clayton";
    case Family::Gumbel:
      return "gumbel";
    case Family::Frank:
      return "frank";
    case Family::Independence:
      return "independence";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "clayton") return Family::Clayton;
  if (name == "gumbel") return Family::Gumbel;
  if (name == "frank") return Family::Frank;
  if (name == "independence") return Family::Independence;
  throw ParameterError("unknown generator family '" + name + "'");
}

void GeneratorSpec::validate() const {
  std::ostringstream os;
  switch (family) {
    case Family::Clayton:
      if (!(std::isfinite(theta) && theta > 0.0)) os << "Clayton requires theta > 0, got " << theta;
      break;
    case Family::Gumbel:
      if (!(std::isfinite(theta) && theta >= 1.0)) os << "Gumbel requires theta >= 1, got " << theta;
      break;
    case Family::Frank:
      if (!(std::isfinite(theta) && theta != 0.0)) os << "Frank requires finite theta != 0, got " << theta;
      break;
    case Family::Independence:
      break;
  }
  if (!os.str().empty()) throw ParameterError(os.str());
}

GeneratorSpec GeneratorSpec::normalized() const {
  validate();
  bool boundary = false;
  switch (family) {
    case Family::Clayton:
      boundary = theta < kBoundaryTolerance;
      break;
    case Family::Gumbel:
      boundary = theta - 1.0 < kBoundaryTolerance;
      break;
    case Family::Frank:
      boundary = std::abs(theta) < kBoundaryTolerance;
      break;
    case Family::Independence:
      boundary = true;
      break;
  }
  if (boundary) return {Family::Independence, 0.0};
  return *this;
}

double phi(const GeneratorSpec& spec, double u) {
  check_unit_interval(u);
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return std::expm1(-g.theta * std::log(u)) / g.theta;
    case Family::Gumbel:
      return std::pow(-std::log(u), g.theta);
    case Family::Frank:
      return -std::log(std::expm1(-g.theta * u) / std::expm1(-g.theta));
    case Family::Independence:
      return -std::log(u);
  }
  return 0.0;
}

double phi_d1(const GeneratorSpec& spec, double u) {
  check_unit_interval(u);
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return -std::exp(-(g.theta + 1.0) * std::log(u));
    case Family::Gumbel: {
      const double l = -std::log(u);
      return -g.theta * std::pow(l, g.theta - 1.0) / u;
    }
    case Family::Frank:
      return -g.theta / std::expm1(g.theta * u);
    case Family::Independence:
      return -1.0 / u;
  }
  return 0.0;
}

double phi_d2(const GeneratorSpec& spec, double u) {
  check_unit_interval(u);
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return (g.theta + 1.0) * std::exp(-(g.theta + 2.0) * std::log(u));
    case Family::Gumbel: {
      const double l = -std::log(u);
      return g.theta * std::pow(l, g.theta - 2.0) * ((g.theta - 1.0) + l) / (u * u);
    }
    case Family::Frank: {
      // theta^2 e^{theta u} / (e^{theta u} - 1)^2, rewritten to avoid overflow.
      const double em = std::expm1(-g.theta * u);
      return g.theta * g.theta * std::exp(-g.theta * u) / (em * em);
    }
    case Family::Independence:
      return 1.0 / (u * u);
  }
  return 0.0;
}

double log_neg_phi_d1(const GeneratorSpec& spec, double u) {
  check_unit_interval(u);
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return -(g.theta + 1.0) * std::log(u);
    case Family::Gumbel: {
      const double l = -std::log(u);
      return std::log(g.theta) + (g.theta - 1.0) * std::log(l) - std::log(u);
    }
    case Family::Frank:
      return std::log(std::abs(g.theta)) - std::log(std::abs(std::expm1(g.theta * u)));
    case Family::Independence:
      return -std::log(u);
  }
  return 0.0;
}

double phi_curvature(const GeneratorSpec& spec, double u) {
  check_unit_interval(u);
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return -(g.theta + 1.0) / u;
    case Family::Gumbel: {
      const double l = -std::log(u);
      return -((g.theta - 1.0) + l) / (u * l);
    }
    case Family::Frank:
      return g.theta / std::expm1(-g.theta * u);
    case Family::Independence:
      return -1.0 / u;
  }
  return 0.0;
}

double psi(const GeneratorSpec& spec, double t) {
  if (!(t >= 0.0)) throw DomainError("psi requires t >= 0");
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return std::exp(-std::log1p(g.theta * t) / g.theta);
    case Family::Gumbel:
      return std::exp(-std::pow(t, 1.0 / g.theta));
    case Family::Frank:
      return -std::log1p(std::expm1(-g.theta) * std::exp(-t)) / g.theta;
    case Family::Independence:
      return std::exp(-t);
  }
  return 0.0;
}

ScaledPsiJet scaled_psi_jet(const GeneratorSpec& spec, double t, std::size_t order) {
  check_order(order);
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("psi jet requires finite t >= 0");
  const GeneratorSpec g = spec.normalized();
  ScaledPsiJet out;
  const double h = expansion_step(g, t);
  out.step = h;

  switch (g.family) {
    case Family::Clayton: {
      const double base = 1.0 + g.theta * t;
      out.log_scale = -std::log1p(g.theta * t) / g.theta;
      out.jet = pow(TaylorJet::variable(1.0, order, g.theta * h / base), -1.0 / g.theta);
      break;
    }
    case Family::Gumbel: {
      if (t <= 0.0) throw NumericError("Gumbel psi derivatives are unbounded at t = 0");
      const double alpha = 1.0 / g.theta;
      const double t_alpha = std::pow(t, alpha);
      TaylorJet shifted = pow(TaylorJet::variable(1.0, order, h / t), alpha) * t_alpha;
      shifted[0] = 0.0;
      out.log_scale = -t_alpha;
      out.jet = exp(-shifted);
      break;
    }
    case Family::Frank: {
      const double a = std::expm1(-g.theta);
      const double y0 = a * std::exp(-t);
      std::vector<double> e(order + 1);
      e[0] = 1.0;
      for (std::size_t k = 1; k <= order; ++k) e[k] = e[k - 1] * (-h) / static_cast<double>(k);
      const double d0 = 1.0 + y0;
      // log(1 + y0 * E) / y0 with E = exp(-h x).
      std::vector<double> l(order + 1, 0.0);
      l[0] = (y0 == 0.0) ? 1.0 : std::log1p(y0) / y0;
      for (std::size_t k = 1; k <= order; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * l[j] * (y0 * e[k - j]);
        l[k] = (e[k] - s / static_cast<double>(k)) / d0;
      }
      out.log_scale = std::log(-a / g.theta) - t;
      out.jet = TaylorJet(std::move(l));
      break;
    }
    case Family::Independence: {
      std::vector<double> e(order + 1);
      e[0] = 1.0;
      for (std::size_t k = 1; k <= order; ++k) e[k] = e[k - 1] * (-h) / static_cast<double>(k);
      out.log_scale = -t;
      out.jet = TaylorJet(std::move(e));
      break;
    }
  }
  return out;
}

LogSignedValue ScaledPsiJet::derivative(std::size_t k) const {
  const double c = jet[k];
  if (c == 0.0) return {};
  return {log_scale + std::log(std::abs(c)) + std::lgamma(static_cast<double>(k) + 1.0) -
              static_cast<double>(k) * std::log(step),
          c > 0.0 ? 1 : -1};
}

double ScaledPsiJet::derivative_ratio(std::size_t k) const {
  const double ck = jet[k];
  if (ck == 0.0 || !std::isfinite(ck)) {
    std::ostringstream os;
    os << "psi derivative of order " << k << " vanished to machine precision";
    throw NumericError(os.str());
  }
  return static_cast<double>(k + 1) * jet[k + 1] / (ck * step);
}

TaylorJet jet_psi(const GeneratorSpec& spec, double t, std::size_t order) {
  const ScaledPsiJet scaled = scaled_psi_jet(spec, t, order);
  std::vector<double> c(order + 1);
  for (std::size_t j = 0; j <= order; ++j) {
    const double cj = scaled.jet[j];
    if (cj == 0.0) {
      c[j] = 0.0;
      continue;
    }
    const double log_abs =
        scaled.log_scale + std::log(std::abs(cj)) - static_cast<double>(j) * std::log(scaled.step);
    if (log_abs > std::log(std::numeric_limits<double>::max())) {
      std::ostringstream os;
      os << "Taylor coefficient " << j << " of psi overflows: sign " << (cj > 0 ? '+' : '-')
         << ", log|c| = " << log_abs;
      throw NumericError(os.str());
    }
    c[j] = std::copysign(std::exp(log_abs), cj);
  }
  return TaylorJet(std::move(c));
}

double psi_ratio(const GeneratorSpec& spec, double t, int d) {
  if (d < 1 || d > kMaxDimension) throw ParameterError("psi_ratio requires 1 <= d <= 64");
  if (!(t >= 0.0)) throw DomainError("psi_ratio requires t >= 0");
  const GeneratorSpec g = spec.normalized();
  switch (g.family) {
    case Family::Clayton:
      return -(1.0 + d * g.theta) / (1.0 + g.theta * t);
    case Family::Independence:
      return -1.0;
    case Family::Gumbel:
    case Family::Frank:
      break;
  }
  return scaled_psi_jet(g, t, static_cast<std::size_t>(d) + 1).derivative_ratio(d);
}

double psi_ratio_jet(const GeneratorSpec& spec, double t, int d) {
  if (d < 1 || d > kMaxDimension) throw ParameterError("psi_ratio requires 1 <= d <= 64");
  return scaled_psi_jet(spec, t, static_cast<std::size_t>(d) + 1).derivative_ratio(d);
}

LogSignedValue psi_derivative(const GeneratorSpec& spec, double t, int k) {
  if (k < 0 || k > static_cast<int>(kMaxJetOrder)) throw ParameterError("psi_derivative: order out of range");
  if (!(t >= 0.0)) throw DomainError("psi_derivative requires t >= 0");
  const GeneratorSpec g = spec.normalized();
  const int sign = (k % 2 == 0) ? 1 : -1;
  switch (g.family) {
    case Family::Clayton: {
      double log_abs = -(1.0 / g.theta + k) * std::log1p(g.theta * t);
      for (int i = 1; i < k; ++i) log_abs += std::log1p(i * g.theta);
      return {log_abs, sign};
    }
    case Family::Independence:
      return {-t, sign};
    case Family::Gumbel:
    case Family::Frank:
      break;
  }
  return scaled_psi_jet(g, t, static_cast<std::size_t>(k)).derivative(static_cast<std::size_t>(k));
}

}  // namespace csd
