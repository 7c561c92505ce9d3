#include "cross/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cross/abm.hpp"
#include "cross/kinetic.hpp"
#include "cross/meanfield_fv.hpp"
#include "cross/meanfield_mc.hpp"
#include "cross/rng.hpp"
#include "cross/stats.hpp"

namespace cross {

std::string to_string(Tier t) {
    switch (t) {
        case Tier::abm: return "abm";
        case Tier::kinetic: return "kinetic";
        case Tier::mf_fv: return "mf-fv";
        case Tier::mf_mc: return "mf-mc";
    }
    return "?";
}

std::vector<std::string> ExperimentSpec::flag_errors() const {
    std::vector<std::string> errs;
    const bool meanfield = tier == Tier::mf_fv || tier == Tier::mf_mc;
    if (!meanfield) {
        if (init != InitKind::uniform)
            errs.push_back("init kind applies to the mean-field tiers only");
        if (initial_ed != 0.0)
            errs.push_back("initial_ed applies to the mean-field tiers only");
    }
    if (snapshot_every < 0) errs.push_back("snapshot_every must be >= 0");
    if (n_seeds < 1) errs.push_back("n_seeds must be >= 1");
    if (!(initial_ed > -1.0 && initial_ed < 1.0) && initial_ed != 0.0)
        errs.push_back("initial_ed must lie in (-1, 1)");
    return errs;
}

namespace {

ExperimentSpec base_spec(std::string_view preset, Tier tier) {
    ExperimentSpec s;
    s.tier = tier;
    auto bundle = load_preset(preset);
    s.params = bundle.params;
    if (bundle.grid) s.grid = *bundle.grid;
    return s;
}

GridSpec wide_grid(const ModelParams& p, double m_lo, double m_hi) {
    GridSpec g = default_grid(p);
    g.m_lo = m_lo;
    g.m_hi = m_hi;
    return g;
}

}  // namespace

ExperimentSpec figure_preset(std::string_view name) {
    // Stochastic mean-field scenarios run on wider memory domains than the
    // deterministic ones: the multiplicative price walk must stay on the
    // grid for the whole horizon.
    if (name == "fig-firstOriginal-blue") {
        auto s = base_spec("abm-original", Tier::abm);
        s.arm = PressureArm::inaction_only;
        s.name = name;
        return s;
    }
    if (name == "fig-firstOriginal-green") {
        auto s = base_spec("abm-original", Tier::abm);
        s.name = name;
        return s;
    }
    if (name == "fig-secondOriginal") {
        auto s = base_spec("abm-original", Tier::abm);
        s.params.theta = 2.0;
        s.name = name;
        return s;
    }
    if (name == "fig-KineticParticlefirst-blue") {
        auto s = base_spec("kinetic-particle", Tier::kinetic);
        s.arm = PressureArm::inaction_only;
        s.params.lambda1 = 0.0;
        s.params.lambda2 = 1.0;
        s.name = name;
        return s;
    }
    if (name == "fig-KineticParticlefirst-green") {
        auto s = base_spec("kinetic-particle", Tier::kinetic);
        s.name = name;
        return s;
    }
    if (name == "fig-KineticParticlesecond") {
        auto s = base_spec("kinetic-particle", Tier::kinetic);
        s.params.theta = 2.0;
        s.name = name;
        return s;
    }
    if (name == "fig-homo1") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.arm = PressureArm::inaction_only;
        s.grid = wide_grid(s.params, 0.125, 8.0);
        s.name = name;
        return s;
    }
    if (name == "fig-hetero1" || name == "fig-hetero2") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.params.theta = name == "fig-hetero2" ? 2.0 : 0.0;
        s.grid = wide_grid(s.params, 0.05, 20.0);
        s.initial_ed = 0.334;
        s.name = name;
        return s;
    }
    if (name == "fig-ODE1") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.arm = PressureArm::inaction_only;
        s.deterministic_price = true;
        s.name = name;
        return s;
    }
    if (name == "fig-ODE2") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.deterministic_price = true;
        s.initial_ed = 0.334;
        s.name = name;
        return s;
    }
    if (name == "fig-MC") {
        auto s = base_spec("meanfield", Tier::mf_mc);
        s.params.theta = 2.0;
        s.name = name;
        return s;
    }
    if (name == "fig-Supp") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.arm = PressureArm::inaction_only;
        s.deterministic_price = true;
        s.init = InitKind::null_support;
        s.name = name;
        return s;
    }
    if (name == "fig-Stability") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.arm = PressureArm::inaction_only;
        s.deterministic_price = true;
        s.initial_ed = 0.99;
        s.name = name;
        return s;
    }
    if (name == "fig-StabH") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.deterministic_price = true;
        s.initial_ed = 0.01;
        s.name = name;
        return s;
    }
    if (name == "fig-SuppH") {
        auto s = base_spec("meanfield", Tier::mf_fv);
        s.deterministic_price = true;
        s.init = InitKind::null_support;
        s.initial_ed = 0.01;
        s.name = name;
        return s;
    }
    throw std::invalid_argument("unknown figure preset '" + std::string(name) + "'");
}

std::vector<std::string> figure_preset_names() {
    return {"fig-firstOriginal-blue",
            "fig-firstOriginal-green",
            "fig-secondOriginal",
            "fig-KineticParticlefirst-blue",
            "fig-KineticParticlefirst-green",
            "fig-KineticParticlesecond",
            "fig-homo1",
            "fig-hetero1",
            "fig-hetero2",
            "fig-ODE1",
            "fig-ODE2",
            "fig-MC",
            "fig-Supp",
            "fig-Stability",
            "fig-SuppH",
            "fig-StabH"};
}

SimulationRecord run_single(const ExperimentSpec& spec, std::uint64_t seed) {
    auto errs = spec.flag_errors();
    if (!errs.empty()) {
        std::string msg = "invalid experiment spec:";
        for (const auto& e : errs) msg += " " + e + ";";
        throw std::invalid_argument(msg);
    }
    validate(spec.params);
    RandomSource rng(seed);
    switch (spec.tier) {
        case Tier::abm:
            return run_abm(spec.params, spec.arm, rng);
        case Tier::kinetic:
            return run_kinetic_particle(spec.params, spec.arm, rng);
        case Tier::mf_fv: {
            FvRunOptions opt;
            opt.deterministic_price = spec.deterministic_price;
            opt.snapshot_every = spec.snapshot_every;
            opt.snapshot_dir = spec.out_dir;
            if (spec.arm == PressureArm::inaction_only) {
                const Grid1D g1 = m_axis(spec.grid);
                DensityField1D init =
                    spec.init == InitKind::uniform
                        ? make_uniform_profile(spec.params, g1, spec.initial_ed)
                        : make_null_support_profile(spec.params, g1, spec.initial_ed);
                return run_fv_homogeneous(spec.params, g1, std::move(init), opt, &rng)
                    .record;
            }
            validate(spec.grid, spec.params);
            DensityField init =
                spec.init == InitKind::uniform
                    ? make_uniform_product_field(spec.params, spec.grid, spec.initial_ed)
                    : make_null_support_field(spec.params, spec.grid, spec.initial_ed);
            return run_fv_heterogeneous(spec.params, spec.grid, std::move(init), opt, &rng)
                .record;
        }
        case Tier::mf_mc: {
            McRunOptions opt;
            opt.deterministic_price = spec.deterministic_price;
            opt.snapshot_every = spec.snapshot_every;
            opt.snapshot_dir = spec.out_dir;
            validate(spec.grid, spec.params);
            return run_mc(spec.params, spec.grid, spec.arm, spec.initial_ed, opt, rng).record;
        }
    }
    throw std::logic_error("unreachable tier");
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);

    struct SeedResult {
        SeedOutcome outcome;
        std::vector<double> acf_raw, acf_abs;
    };

    auto run_one = [&spec](int index) -> SeedResult {
        SeedResult r;
        r.outcome.index = index;
        r.outcome.seed = split_seed(spec.master_seed, static_cast<std::uint64_t>(index));
        try {
            ExperimentSpec seed_spec = spec;
            if (spec.snapshot_every > 0 && spec.n_seeds > 1) {
                seed_spec.out_dir = spec.out_dir / ("seed_" + std::to_string(index));
                fs::create_directories(seed_spec.out_dir);
            }
            SimulationRecord rec = run_single(seed_spec, r.outcome.seed);
            std::ostringstream name;
            name << "record_" << index << ".csv";
            r.outcome.record_file = name.str();
            write_record_csv(rec, spec.out_dir / name.str());
            const auto returns = log_returns(rec.s);
            r.outcome.excess_kurtosis = excess_kurtosis(returns);
            r.outcome.clustering = abs_acf_mean(returns);
            r.outcome.band_fraction = acf_band_fraction(returns);
            r.acf_raw = acf(returns, 50);
            std::vector<double> abs_r(returns.size());
            for (std::size_t k = 0; k < returns.size(); ++k) abs_r[k] = std::abs(returns[k]);
            r.acf_abs = acf(abs_r, 50);
            r.outcome.ok = true;
        } catch (const std::exception& e) {
            r.outcome.ok = false;
            r.outcome.error = e.what();
        }
        return r;
    };

    // fixed-size worker pool over seed indices
    const int workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                        static_cast<unsigned>(spec.n_seeds)));
    std::vector<SeedResult> results(static_cast<std::size_t>(spec.n_seeds));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < spec.n_seeds; i = next.fetch_add(1)) {
                results[static_cast<std::size_t>(i)] = run_one(i);
            }
        });
    }
    for (auto& th : pool) th.join();

    ExperimentSummary summary;
    std::vector<double> kurts, clusters;
    summary.pooled_acf_raw.assign(51, 0.0);
    summary.pooled_acf_abs.assign(51, 0.0);
    int ok_count = 0;
    for (auto& r : results) {
        if (r.outcome.ok) {
            ++ok_count;
            kurts.push_back(r.outcome.excess_kurtosis);
            clusters.push_back(r.outcome.clustering);
            for (std::size_t l = 0; l < 51; ++l) {
                summary.pooled_acf_raw[l] += r.acf_raw[l];
                summary.pooled_acf_abs[l] += r.acf_abs[l];
            }
        } else {
            ++summary.n_failed;
        }
        summary.outcomes.push_back(r.outcome);
    }
    if (ok_count == 0) {
        throw std::runtime_error("every seed of experiment '" + spec.name +
                                 "' failed; first error: " + summary.outcomes.front().error);
    }
    for (std::size_t l = 0; l < 51; ++l) {
        summary.pooled_acf_raw[l] /= ok_count;
        summary.pooled_acf_abs[l] /= ok_count;
    }
    double mean = 0.0;
    for (double k : kurts) mean += k;
    mean /= static_cast<double>(kurts.size());
    double var = 0.0;
    for (double k : kurts) var += (k - mean) * (k - mean);
    var = kurts.size() > 1 ? var / static_cast<double>(kurts.size() - 1) : 0.0;
    summary.kurtosis_mean = mean;
    summary.kurtosis_median = median_of(kurts);
    summary.kurtosis_stddev = std::sqrt(var);
    double cmean = 0.0;
    for (double c : clusters) cmean += c;
    summary.clustering_mean = cmean / static_cast<double>(clusters.size());

    nlohmann::ordered_json j;
    j["experiment"] = spec.name;
    j["tier"] = to_string(spec.tier);
    j["arm"] = spec.arm == PressureArm::full ? "full" : "inaction-only";
    j["deterministic_price"] = spec.deterministic_price;
    j["theta"] = spec.params.theta;
    j["master_seed"] = spec.master_seed;
    j["n_seeds"] = spec.n_seeds;
    j["n_failed"] = summary.n_failed;
    j["kurtosis"] = {{"mean", summary.kurtosis_mean},
                     {"median", summary.kurtosis_median},
                     {"stddev", summary.kurtosis_stddev}};
    j["clustering_mean"] = summary.clustering_mean;
    j["acf_raw_pooled"] = summary.pooled_acf_raw;
    j["acf_abs_pooled"] = summary.pooled_acf_abs;
    auto seeds = nlohmann::ordered_json::array();
    for (const auto& o : summary.outcomes) {
        nlohmann::ordered_json e;
        e["index"] = o.index;
        e["seed"] = o.seed;
        e["ok"] = o.ok;
        if (o.ok) {
            e["record"] = o.record_file;
            e["excess_kurtosis"] = o.excess_kurtosis;
            e["clustering"] = o.clustering;
            e["band_fraction"] = o.band_fraction;
        } else {
            e["error"] = o.error;
        }
        seeds.push_back(e);
    }
    j["seeds"] = seeds;
    std::ofstream os(spec.out_dir / "summary.json", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write summary.json");
    os << j.dump(2) << '\n';
    return summary;
}

}  // namespace cross
