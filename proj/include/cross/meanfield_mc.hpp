#pragma once

#include <cstdint>
#include <vector>

#include "cross/density.hpp"
#include "cross/market.hpp"
#include "cross/record.hpp"
#include "cross/rng.hpp"
#include "cross/switching.hpp"

namespace cross {

/// Sample cloud for the Monte Carlo mean-field solver.
struct SampleEnsemble {
    std::vector<double> m;
    std::vector<double> c;
    std::vector<std::int8_t> gamma;
    std::int64_t long_count = 0;

    std::size_t size() const { return gamma.size(); }
    double ed() const {
        return excess_demand_from_counts(long_count, static_cast<std::int64_t>(size()));
    }
};

/// Samples from the default product initialization: the first
/// round(N(1+ed0)/2) samples long, m ~ Unif(M1(s0), M4(s0)),
/// c ~ Unif(B1, B2). All m draws precede all c draws.
SampleEnsemble init_samples(const ModelParams& p, double ed0, RandomSource& rng);

/// Effective per-step switch probability 1 - exp(-dt lambda); lies in [0,1)
/// for every finite rate, so no step-size restriction applies.
double effective_switch_prob(double rate, double dt);

/// One algorithm step: ED and S^{k+1} first, then every sample switches with
/// probability 1-exp(-dt lambda) (re-emitted at m = S^{k+1}, c = 0) or keeps
/// its state with the herding pressure advanced. One uniform per sample, in
/// sample order.
void mc_step(SampleEnsemble& e, MarketState& mkt, const ModelParams& p, PressureArm arm,
             RandomSource& rng, bool deterministic_price);

/// Histogram density: cell value = count / (N * cell area) per species.
/// Samples outside the grid are skipped and counted into *out_of_range.
DensityField reconstruct_density(const SampleEnsemble& e, const GridSpec& g,
                                 std::size_t* out_of_range = nullptr);

struct McRunOptions {
    bool deterministic_price = false;
    int snapshot_every = 0;
    std::filesystem::path snapshot_dir;
};

struct McRunResult {
    SimulationRecord record;
    SampleEnsemble final_samples;
};

McRunResult run_mc(const ModelParams& p, const GridSpec& g, PressureArm arm, double ed0,
                   const McRunOptions& opt, RandomSource& rng);

}  // namespace cross
