#pragma once

#include <span>
#include <vector>

namespace cross {

/// Log-returns r_k = log(S_k) - log(S_{k-1}). Throws on a nonpositive price
/// or fewer than two samples.
std::vector<double> log_returns(std::span<const double> prices);

/// Sample autocorrelation rho(l) = sum_k (x_k-xbar)(x_{k+l}-xbar) / sum_k (x_k-xbar)^2
/// for l = 0..max_lag (rho(0) = 1). Requires n > max_lag >= 1 and nonzero
/// variance.
std::vector<double> acf(std::span<const double> series, int max_lag);

/// m4/m2^2 - 3 with biased sample central moments. Requires n >= 4 and
/// nonzero variance.
double excess_kurtosis(std::span<const double> series);

struct QQPoint {
    double theoretical;  ///< standard-normal quantile at (k-0.5)/n
    double sample;       ///< k-th smallest standardized sample value
};

/// Standardized order statistics against normal quantiles at plotting
/// positions (k-0.5)/n. Requires n >= 10 and nonzero variance.
std::vector<QQPoint> qq_points(std::span<const double> series);

/// Volatility-clustering summary: mean of the absolute-value ACF over
/// lags 1..max_lag.
double abs_acf_mean(std::span<const double> returns, int max_lag = 50);

/// Fraction of lags 1..max_lag whose raw ACF lies inside the white-noise
/// band +-2/sqrt(n).
double acf_band_fraction(std::span<const double> returns, int max_lag = 50);

}  // namespace cross
