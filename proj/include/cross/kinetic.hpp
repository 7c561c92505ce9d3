#pragma once

#include <cstdint>
#include <vector>

#include "cross/market.hpp"
#include "cross/record.hpp"
#include "cross/rng.hpp"
#include "cross/switching.hpp"

namespace cross {

/// Particle state of the probabilistic-switching tier, stored as parallel
/// arrays. No personal thresholds: the threshold population is absorbed
/// into the switch probabilities.
struct KineticEnsemble {
    std::vector<double> c;
    std::vector<double> m;
    std::vector<std::int8_t> gamma;
    std::int64_t long_count = 0;

    std::size_t size() const { return gamma.size(); }
    double ed() const {
        return excess_demand_from_counts(long_count, static_cast<std::int64_t>(size()));
    }
};

KineticEnsemble init_kinetic_ensemble(const ModelParams& p, RandomSource& rng);

/// One step: Euler-Maruyama price update, herding-pressure accumulation
/// (full arm only), then every agent rolls one uniform against
/// lambda_P(c, m, S'). The inaction-only arm uses weights (0, 1).
void kinetic_step(KineticEnsemble& e, MarketState& mkt, const ModelParams& p,
                  PressureArm arm, RandomSource& rng);

SimulationRecord run_kinetic_particle(const ModelParams& p, PressureArm arm,
                                      RandomSource& rng);

}  // namespace cross
