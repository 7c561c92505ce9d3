#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "cross/params.hpp"

namespace cross {

/// Thrown when an Euler-Maruyama price step would produce S <= 0.
/// The step is rejected rather than clamped so that the caller can flag
/// the run; clamping would bias the return statistics.
struct PositivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Price plus the excess-demand bookkeeping every tier shares.
struct MarketState {
    double s = 1.0;        ///< stock price, > 0
    double ed = 0.0;       ///< current excess demand, in [-1,1]
    double ed_prev = 0.0;  ///< previous-step excess demand
    double t = 0.0;

    double delta_ed() const { return ed - ed_prev; }
};

/// Average of the investment positions, in [-1,1]. Throws on an empty list.
double excess_demand(std::span<const std::int8_t> positions);

/// Exact ED for an ensemble tracked by its long count.
inline double excess_demand_from_counts(std::int64_t n_long, std::int64_t n_total) {
    return static_cast<double>(2 * n_long - n_total) / static_cast<double>(n_total);
}

/// Exponential price update used by the threshold model:
/// S' = S * exp{(1+theta|ED|)(sqrt(dt) eta - dt/2) + kappa dED}.
double price_step_exponential(const MarketState& m, const ModelParams& p, double eta);

/// Euler-Maruyama update used by the kinetic and mean-field tiers:
/// S' = S + kappa dED S + sqrt(dt)(1+theta|ED|) S eta.
/// Throws PositivityError if S' <= 0. The step size defaults to p.dt and can
/// be overridden by solvers that sub-step.
double price_step_euler_maruyama(const MarketState& m, const ModelParams& p, double eta,
                                 double dt_override = -1.0);

/// Drift-only price update, S' = S + kappa dED S (the noise-free skeleton).
double price_step_deterministic(const MarketState& m, const ModelParams& p);

}  // namespace cross
