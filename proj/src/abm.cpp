#include "cross/abm.hpp"

namespace cross {

AgentEnsemble init_ensemble(const ModelParams& p, PressureArm arm, RandomSource& rng) {
    validate(p);
    const auto n = static_cast<std::size_t>(p.n_agents);
    AgentEnsemble e;
    e.arm = arm;
    e.agents.resize(n);
    const auto n_long = static_cast<std::size_t>((2 * p.n_agents + 2) / 3);  // ceil(2N/3)
    for (std::size_t i = 0; i < n; ++i) {
        e.agents[i].gamma = i < n_long ? 1 : -1;
        e.agents[i].c = p.herding_lo();
        e.agents[i].m = p.s0;
    }
    e.long_count = static_cast<std::int64_t>(n_long);
    for (auto& a : e.agents) a.alpha = rng.uniform(p.a1, p.a2);
    for (auto& a : e.agents) a.beta = rng.uniform(p.herding_lo(), p.herding_hi());
    return e;
}

bool inaction_triggered(const Agent& a, double s) {
    return s < a.m / (1.0 + a.alpha) || s > a.m * (1.0 + a.alpha);
}

void herding_update(Agent& a, double ed, double dt) {
    a.c = herding_pressure_step(a.c, a.gamma, ed, dt);
}

void abm_step(AgentEnsemble& e, MarketState& mkt, const ModelParams& p, RandomSource& rng) {
    const double s_new = price_step_exponential(mkt, p, rng.normal());
    const double ed = mkt.ed;
    const bool herding_on = e.arm == PressureArm::full;
    for (auto& a : e.agents) {
        if (herding_on) herding_update(a, ed, p.dt);
        bool trigger = herding_on && a.c > a.beta;
        if (!trigger) trigger = inaction_triggered(a, s_new);
        if (trigger) {
            a.gamma = static_cast<std::int8_t>(-a.gamma);
            e.long_count += a.gamma;  // +1 short->long, -1 long->short
            a.c = 0.0;
            a.m = s_new;
        }
    }
    mkt.ed_prev = mkt.ed;
    mkt.ed = e.ed();
    mkt.s = s_new;
    mkt.t += p.dt;
}

SimulationRecord run_abm(const ModelParams& p, PressureArm arm, RandomSource& rng) {
    AgentEnsemble e = init_ensemble(p, arm, rng);
    MarketState mkt{p.s0, e.ed(), 0.0, 0.0};
    mkt.ed_prev = mkt.ed;  // dED = 0 on the first step
    SimulationRecord rec;
    rec.push(0.0, mkt.s, mkt.ed);
    const auto n_steps = p.step_count();
    for (std::int64_t k = 0; k < n_steps; ++k) {
        abm_step(e, mkt, p, rng);
        mkt.t = static_cast<double>(k + 1) * p.dt;
        rec.push(mkt.t, mkt.s, mkt.ed);
    }
    rec.info["tier"] = "abm";
    rec.info["arm"] = arm == PressureArm::full ? "full" : "inaction-only";
    return rec;
}

}  // namespace cross
