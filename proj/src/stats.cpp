#include "cross/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cross/gaussian.hpp"

namespace cross {

namespace {

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> log_returns(std::span<const double> prices) {
    if (prices.size() < 2) throw std::invalid_argument("log_returns: need >= 2 prices");
    std::vector<double> r(prices.size() - 1);
    for (std::size_t k = 0; k + 1 < prices.size(); ++k) {
        if (!(prices[k] > 0.0) || !(prices[k + 1] > 0.0)) {
            throw std::invalid_argument("log_returns: nonpositive price in series");
        }
        r[k] = std::log(prices[k + 1]) - std::log(prices[k]);
    }
    return r;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    if (max_lag < 1) throw std::invalid_argument("acf: max_lag must be >= 1");
    if (n <= max_lag) throw std::invalid_argument("acf: series shorter than max_lag");
    const double xbar = mean_of(series);
    double denom = 0.0;
    for (double v : series) denom += (v - xbar) * (v - xbar);
    if (!(denom > 0.0)) throw std::invalid_argument("acf: zero variance");
    std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1);
    rho[0] = 1.0;
    for (int l = 1; l <= max_lag; ++l) {
        double num = 0.0;
        for (std::ptrdiff_t k = 0; k + l < n; ++k) {
            num += (series[k] - xbar) * (series[k + l] - xbar);
        }
        rho[static_cast<std::size_t>(l)] = num / denom;
    }
    return rho;
}

double excess_kurtosis(std::span<const double> series) {
    if (series.size() < 4) throw std::invalid_argument("excess_kurtosis: need >= 4 samples");
    const double xbar = mean_of(series);
    double m2 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - xbar;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(series.size());
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw std::invalid_argument("excess_kurtosis: zero variance");
    return m4 / (m2 * m2) - 3.0;
}

std::vector<QQPoint> qq_points(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 10) throw std::invalid_argument("qq_points: need >= 10 samples");
    const double xbar = mean_of(series);
    double m2 = 0.0;
    for (double v : series) m2 += (v - xbar) * (v - xbar);
    m2 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw std::invalid_argument("qq_points: zero variance");
    const double sd = std::sqrt(m2);

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<QQPoint> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
        pts[k] = {normal_quantile(u), (sorted[k] - xbar) / sd};
    }
    return pts;
}

double abs_acf_mean(std::span<const double> returns, int max_lag) {
    std::vector<double> a(returns.size());
    for (std::size_t k = 0; k < returns.size(); ++k) a[k] = std::abs(returns[k]);
    auto rho = acf(a, max_lag);
    double s = 0.0;
    for (int l = 1; l <= max_lag; ++l) s += rho[static_cast<std::size_t>(l)];
    return s / max_lag;
}

double acf_band_fraction(std::span<const double> returns, int max_lag) {
    auto rho = acf(returns, max_lag);
    const double band = 2.0 / std::sqrt(static_cast<double>(returns.size()));
    int inside = 0;
    for (int l = 1; l <= max_lag; ++l) {
        if (std::abs(rho[static_cast<std::size_t>(l)]) <= band) ++inside;
    }
    return static_cast<double>(inside) / max_lag;
}

}  // namespace cross
