#pragma once

#include <functional>
#include <span>
#include <vector>

#include "csd/base_kernel.hpp"
#include "csd/copula_model.hpp"

namespace csd {

/// Five-point central difference of f at x with step h.
double central_difference(const std::function<double(double)>& f, double x, double h);

/// Gradient of log_density by five-point differences; the step shrinks near the
/// boundary so every probe stays inside the cube.
std::vector<double> fd_score(const CopulaModel& model, std::span<const double> u);

/// The four Stein-kernel terms rebuilt from raw finite-difference partials of the
/// base kernel value and finite-difference scores.
struct SteinTerms {
  double score_score = 0.0;  // s(u)'s(v) k
  double score_grad_v = 0.0; // s(u)' grad_v k
  double score_grad_u = 0.0; // s(v)' grad_u k
  double trace = 0.0;        // tr(grad_u grad_v' k)
  double total() const { return score_score + score_grad_v + score_grad_u + trace; }
  double magnitude() const;
};
SteinTerms fd_stein_kernel(const CopulaModel& model, const BaseKernelSpec& base, std::span<const double> u,
                           std::span<const double> v);

}  // namespace csd
