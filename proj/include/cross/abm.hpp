#pragma once

#include <cstdint>
#include <vector>

#include "cross/market.hpp"
#include "cross/record.hpp"
#include "cross/rng.hpp"
#include "cross/switching.hpp"

namespace cross {

/// One threshold trader: position, herding pressure, the price of the last
/// switch, and the personal thresholds drawn once at initialization.
struct Agent {
    double c;      ///< herding pressure, >= 0
    double m;      ///< price of the last switch
    double alpha;  ///< inaction threshold, Unif(A1,A2)
    double beta;   ///< herding threshold, Unif(B1,B2)
    std::int8_t gamma;
};

struct AgentEnsemble {
    std::vector<Agent> agents;
    PressureArm arm = PressureArm::full;
    std::int64_t long_count = 0;

    double ed() const {
        return excess_demand_from_counts(long_count,
                                         static_cast<std::int64_t>(agents.size()));
    }
};

/// First ceil(2N/3) agents start long, the rest short; c = B1, m = S(0).
/// All alpha draws precede all beta draws, so a run that never consults the
/// betas is unaffected by resampling them.
AgentEnsemble init_ensemble(const ModelParams& p, PressureArm arm, RandomSource& rng);

/// True when s falls strictly outside the closed interval
/// [m/(1+alpha), m(1+alpha)].
bool inaction_triggered(const Agent& a, double s);

/// Herding pressure update, c += dt|ED| while holding the minority position.
void herding_update(Agent& a, double ed, double dt);

/// One time step: excess demand, exponential price update, herding-pressure
/// accumulation against the step's ED snapshot, then threshold switches
/// against the updated price (a double trigger still switches once).
void abm_step(AgentEnsemble& e, MarketState& mkt, const ModelParams& p, RandomSource& rng);

SimulationRecord run_abm(const ModelParams& p, PressureArm arm, RandomSource& rng);

}  // namespace cross
