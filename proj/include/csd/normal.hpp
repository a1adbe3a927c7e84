#pragma once

namespace csd {

/// Standard normal CDF.
double normal_cdf(double z);
/// log of the standard normal density.
double normal_log_pdf(double z);
/// Inverse standard normal CDF for p in (0,1).
///
/// Acklam's rational approximation (relative error ~1.15e-9) followed by one
/// Halley correction step against erfc, which brings it to near machine precision.
double normal_quantile(double p);

}  // namespace csd
