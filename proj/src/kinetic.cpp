#include "cross/kinetic.hpp"

#include <algorithm>
#include <cmath>

namespace cross {

KineticEnsemble init_kinetic_ensemble(const ModelParams& p, RandomSource& rng) {
    (void)rng;  // the table initialization is deterministic
    validate(p);
    const auto n = static_cast<std::size_t>(p.n_agents);
    KineticEnsemble e;
    e.c.assign(n, p.herding_lo());
    e.m.assign(n, p.s0);
    e.gamma.resize(n);
    const auto n_long = static_cast<std::size_t>((2 * p.n_agents + 2) / 3);
    for (std::size_t i = 0; i < n; ++i) e.gamma[i] = i < n_long ? 1 : -1;
    e.long_count = static_cast<std::int64_t>(n_long);
    return e;
}

void kinetic_step(KineticEnsemble& e, MarketState& mkt, const ModelParams& p,
                  PressureArm arm, RandomSource& rng) {
    const double s_new = price_step_euler_maruyama(mkt, p, rng.normal());
    const double ed = mkt.ed;
    const bool full = arm == PressureArm::full;
    const double w1 = full ? p.lambda1 : 0.0;
    const double w2 = full ? p.lambda2 : 1.0;
    const double b_lo = p.herding_lo();
    const double inv_ramp = 1.0 / (p.herding_hi() - b_lo);
    const double k1 = 1.0 / (1.0 + p.a2), k2 = 1.0 / (1.0 + p.a1);
    const double k3 = 1.0 + p.a1, k4 = 1.0 + p.a2;
    const double abs_ed = std::abs(ed);
    const double herding_inc = p.dt * abs_ed;
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (full && e.gamma[i] * ed < 0.0) e.c[i] += herding_inc;
        const double prob_h = std::clamp((e.c[i] - b_lo) * inv_ramp, 0.0, 1.0);
        const double m1 = e.m[i] * k1, m2 = e.m[i] * k2;
        const double m3 = e.m[i] * k3, m4 = e.m[i] * k4;
        const double prob_q = std::clamp((m2 - s_new) / (m2 - m1), 0.0, 1.0) +
                              std::clamp((s_new - m3) / (m4 - m3), 0.0, 1.0);
        const double lambda_p = w1 * prob_h + w2 * prob_q;
        if (rng.uniform01() < lambda_p) {
            e.gamma[i] = static_cast<std::int8_t>(-e.gamma[i]);
            e.long_count += e.gamma[i];
            e.m[i] = s_new;
            e.c[i] = 0.0;
        }
    }
    mkt.ed_prev = mkt.ed;
    mkt.ed = e.ed();
    mkt.s = s_new;
    mkt.t += p.dt;
}

SimulationRecord run_kinetic_particle(const ModelParams& p, PressureArm arm,
                                      RandomSource& rng) {
    KineticEnsemble e = init_kinetic_ensemble(p, rng);
    MarketState mkt{p.s0, e.ed(), 0.0, 0.0};
    mkt.ed_prev = mkt.ed;
    SimulationRecord rec;
    rec.push(0.0, mkt.s, mkt.ed);
    const auto n_steps = p.step_count();
    for (std::int64_t k = 0; k < n_steps; ++k) {
        kinetic_step(e, mkt, p, arm, rng);
        mkt.t = static_cast<double>(k + 1) * p.dt;
        rec.push(mkt.t, mkt.s, mkt.ed);
    }
    rec.info["tier"] = "kinetic";
    rec.info["arm"] = arm == PressureArm::full ? "full" : "inaction-only";
    return rec;
}

}  // namespace cross
