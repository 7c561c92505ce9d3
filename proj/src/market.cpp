#include "cross/market.hpp"

#include <cmath>

namespace cross {

double excess_demand(std::span<const std::int8_t> positions) {
    if (positions.empty()) {
        throw std::invalid_argument("excess_demand: empty position list");
    }
    std::int64_t sum = 0;
    for (auto g : positions) sum += g;
    return static_cast<double>(sum) / static_cast<double>(positions.size());
}

double price_step_exponential(const MarketState& m, const ModelParams& p, double eta) {
    const double amp = 1.0 + p.theta * std::abs(m.ed);
    const double expo = amp * (std::sqrt(p.dt) * eta - 0.5 * p.dt) + p.kappa * m.delta_ed();
    return m.s * std::exp(expo);
}

double price_step_euler_maruyama(const MarketState& m, const ModelParams& p, double eta,
                                 double dt_override) {
    const double dt = dt_override > 0.0 ? dt_override : p.dt;
    const double amp = 1.0 + p.theta * std::abs(m.ed);
    const double s_new = m.s + p.kappa * m.delta_ed() * m.s + std::sqrt(dt) * amp * m.s * eta;
    if (!(s_new > 0.0)) {
        throw PositivityError("Euler-Maruyama price step lost positivity (S' <= 0)");
    }
    return s_new;
}

double price_step_deterministic(const MarketState& m, const ModelParams& p) {
    return m.s + p.kappa * m.delta_ed() * m.s;
}

}  // namespace cross
