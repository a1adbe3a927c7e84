#pragma once

#include <cstddef>
#include <string>

#include "csd/jet.hpp"
#include "csd/log_signed.hpp"

namespace csd {

enum class Family { Clayton, Gumbel, Frank, Independence };

/// Largest supported copula dimension; psi-derivative jets have order d + 1.
inline constexpr int kMaxDimension = 64;
inline constexpr std::size_t kMaxJetOrder = kMaxDimension + 1;
/// Parameters this close to the independence boundary are treated as independence.
inline constexpr double kBoundaryTolerance = 1e-8;

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// An Archimedean generator phi with inverse psi.
///   Clayton      phi(u) = (u^-theta - 1) / theta,                theta > 0
///   Gumbel       phi(u) = (-log u)^theta,                        theta >= 1
///   Frank        phi(u) = -log((e^{-theta u} - 1)/(e^{-theta} - 1)),  theta != 0
///   Independence phi(u) = -log u
struct GeneratorSpec {
  Family family = Family::Independence;
  double theta = 0.0;

  /// Throws ParameterError when theta is outside the family's range.
  void validate() const;
  /// Validated copy with boundary parameters mapped to Independence.
  GeneratorSpec normalized() const;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

double phi(const GeneratorSpec& spec, double u);
double phi_d1(const GeneratorSpec& spec, double u);
double phi_d2(const GeneratorSpec& spec, double u);
/// log(-phi'(u)), evaluated without forming phi'(u).
double log_neg_phi_d1(const GeneratorSpec& spec, double u);
/// phi''(u) / phi'(u).
double phi_curvature(const GeneratorSpec& spec, double u);

double psi(const GeneratorSpec& spec, double t);

/// Taylor coefficients of psi at t through `order`; coefficient j is psi^{(j)}(t)/j!.
/// Throws NumericError if a coefficient is not representable as a double.
TaylorJet jet_psi(const GeneratorSpec& spec, double t, std::size_t order);

/// psi expanded in a rescaled variable: psi(t + step * x) = exp(log_scale) * sum_j jet[j] x^j.
/// Factoring out exp(log_scale) and the step keeps every coefficient in range for
/// large orders and for t where psi itself underflows.
struct ScaledPsiJet {
  double log_scale = 0.0;
  double step = 1.0;
  TaylorJet jet;

  /// psi^{(k)}(t) in log-signed form.
  LogSignedValue derivative(std::size_t k) const;
  /// psi^{(k+1)}(t) / psi^{(k)}(t).
  double derivative_ratio(std::size_t k) const;
};

ScaledPsiJet scaled_psi_jet(const GeneratorSpec& spec, double t, std::size_t order);

/// psi^{(d+1)}(t) / psi^{(d)}(t). Clayton and Independence use closed forms,
/// Gumbel and Frank go through scaled_psi_jet.
double psi_ratio(const GeneratorSpec& spec, double t, int d);
/// Same ratio, always through the jet engine (cross-check path).
double psi_ratio_jet(const GeneratorSpec& spec, double t, int d);

/// psi^{(k)}(t) in log-signed form.
LogSignedValue psi_derivative(const GeneratorSpec& spec, double t, int k);

}  // namespace csd
