#include "cross/meanfield_mc.hpp"

#include <cmath>
#include <sstream>

namespace cross {

SampleEnsemble init_samples(const ModelParams& p, double ed0, RandomSource& rng) {
    validate(p);
    const auto n = static_cast<std::size_t>(p.n_agents);
    SampleEnsemble e;
    e.gamma.resize(n);
    const auto n_long =
        static_cast<std::size_t>(std::llround(0.5 * (1.0 + ed0) * static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) e.gamma[i] = i < n_long ? 1 : -1;
    e.long_count = static_cast<std::int64_t>(n_long);
    e.m.resize(n);
    e.c.resize(n);
    const double m_lo = p.s0 / (1.0 + p.a2), m_hi = p.s0 * (1.0 + p.a2);
    for (auto& v : e.m) v = rng.uniform(m_lo, m_hi);
    for (auto& v : e.c) v = rng.uniform(p.herding_lo(), p.herding_hi());
    return e;
}

double effective_switch_prob(double rate, double dt) {
    return -std::expm1(-dt * rate);
}

void mc_step(SampleEnsemble& e, MarketState& mkt, const ModelParams& p, PressureArm arm,
             RandomSource& rng, bool deterministic_price) {
    const double s_new = deterministic_price
                             ? price_step_deterministic(mkt, p)
                             : price_step_euler_maruyama(mkt, p, rng.normal());
    const double ed = mkt.ed;
    const bool full = arm == PressureArm::full;
    const double w1 = full ? p.lambda1 : 0.0;
    const double w2 = full ? p.lambda2 : 1.0;
    const double inv_dtc = 1.0 / p.dt_cross;
    const double herding_inc = p.dt * std::abs(ed);
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double prob = w1 * herding_switch_prob(e.c[i], p) +
                            w2 * inaction_switch_prob(e.m[i], s_new, p);
        const double lhat = effective_switch_prob(prob * inv_dtc, p.dt);
        if (rng.uniform01() < lhat) {
            e.gamma[i] = static_cast<std::int8_t>(-e.gamma[i]);
            e.long_count += e.gamma[i];
            e.m[i] = s_new;
            e.c[i] = 0.0;
        } else if (full && e.gamma[i] * ed < 0.0) {
            e.c[i] += herding_inc;
        }
    }
    mkt.ed_prev = mkt.ed;
    mkt.ed = e.ed();
    mkt.s = s_new;
    mkt.t += p.dt;
}

DensityField reconstruct_density(const SampleEnsemble& e, const GridSpec& g,
                                 std::size_t* out_of_range) {
    DensityField f(g);
    const double inv_dm = 1.0 / g.dm(), inv_dc = 1.0 / g.dc();
    std::size_t skipped = 0;
    const double weight = 1.0 / (static_cast<double>(e.size()) * g.cell_area());
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double m = e.m[k], c = e.c[k];
        if (m < g.m_lo || m >= g.m_hi || c < g.c_lo || c >= g.c_hi) {
            ++skipped;
            continue;
        }
        const int i = static_cast<int>((m - g.m_lo) * inv_dm);
        const int j = static_cast<int>((c - g.c_lo) * inv_dc);
        auto& target = e.gamma[k] > 0 ? f.plus : f.minus;
        target[f.index(j, i)] += weight;
    }
    if (out_of_range) *out_of_range = skipped;
    return f;
}

McRunResult run_mc(const ModelParams& p, const GridSpec& g, PressureArm arm, double ed0,
                   const McRunOptions& opt, RandomSource& rng) {
    McRunResult out;
    out.final_samples = init_samples(p, ed0, rng);
    MarketState mkt{p.s0, out.final_samples.ed(), 0.0, 0.0};
    mkt.ed_prev = mkt.ed;
    out.record.push(0.0, mkt.s, mkt.ed);
    const auto n_steps = p.step_count();
    std::size_t max_skipped = 0;
    for (std::int64_t k = 0; k < n_steps; ++k) {
        mc_step(out.final_samples, mkt, p, arm, rng, opt.deterministic_price);
        mkt.t = static_cast<double>(k + 1) * p.dt;
        out.record.push(mkt.t, mkt.s, mkt.ed);
        if (opt.snapshot_every > 0 && (k + 1) % opt.snapshot_every == 0) {
            std::size_t skipped = 0;
            DensityField f = reconstruct_density(out.final_samples, g, &skipped);
            max_skipped = std::max(max_skipped, skipped);
            std::ostringstream base;
            base << "density_" << (k + 1);
            write_density_csv(f.plus, g.n_m, g.n_c,
                              opt.snapshot_dir / (base.str() + "_plus.csv"));
            write_density_csv(f.minus, g.n_m, g.n_c,
                              opt.snapshot_dir / (base.str() + "_minus.csv"));
        }
    }
    if (max_skipped * 100 > out.final_samples.size()) {
        std::ostringstream os;
        os << max_skipped << " of " << out.final_samples.size()
           << " samples fell outside the reconstruction grid";
        out.record.warnings.push_back(os.str());
    }
    out.record.info["tier"] = "mf-mc";
    out.record.info["arm"] = arm == PressureArm::full ? "full" : "inaction-only";
    out.record.info["samples"] = std::to_string(out.final_samples.size());
    return out;
}

}  // namespace cross
