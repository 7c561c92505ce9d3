#pragma once

#include <cmath>

namespace cross {

/// Standard normal cumulative distribution function.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

/// Inverse of the standard normal CDF for p in (0,1).
///
/// Rational approximation (Acklam) refined by one Halley step, giving
/// absolute error far below 1e-9 over the whole open interval.
double normal_quantile(double p);

}  // namespace cross
