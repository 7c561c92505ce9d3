// crossim - batch driver for the Cross market model tiers:
// threshold agents, kinetic particles, and the mean-field solvers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cross/density.hpp"
#include "cross/diagnostics.hpp"
#include "cross/experiment.hpp"
#include "cross/meanfield_fv.hpp"
#include "cross/record.hpp"
#include "cross/stats.hpp"

namespace {

using namespace cross;

Tier parse_tier(const std::string& s) {
    if (s == "abm") return Tier::abm;
    if (s == "kinetic") return Tier::kinetic;
    if (s == "mf-fv") return Tier::mf_fv;
    if (s == "mf-mc") return Tier::mf_mc;
    throw CLI::ValidationError("tier", "expected abm|kinetic|mf-fv|mf-mc");
}

std::filesystem::path output_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("CROSSIM_OUT"); env && *env) {
        return std::filesystem::path(env);
    }
    return std::filesystem::path(flag_value);
}

int cmd_preset_list() {
    std::cout << "parameter presets:\n";
    for (const auto& n : preset_names()) {
        auto b = load_preset(n);
        std::cout << "  " << n << "  (n_agents=" << b.params.n_agents
                  << (b.grid ? ", with grid" : "") << ")\n";
    }
    std::cout << "experiment presets:\n";
    for (const auto& n : figure_preset_names()) {
        auto s = figure_preset(n);
        std::cout << "  " << n << "  tier=" << to_string(s.tier)
                  << " arm=" << (s.arm == PressureArm::full ? "full" : "inaction-only")
                  << " theta=" << s.params.theta
                  << (s.deterministic_price ? " deterministic" : "") << "\n";
    }
    return 0;
}

int cmd_simulate(const ExperimentSpec& spec) {
    auto summary = run_experiment(spec);
    std::cout << "experiment '" << spec.name << "': " << (spec.n_seeds - summary.n_failed)
              << "/" << spec.n_seeds << " seeds completed\n"
              << "  kurtosis mean=" << summary.kurtosis_mean
              << " median=" << summary.kurtosis_median
              << "  clustering=" << summary.clustering_mean << "\n"
              << "  outputs in " << spec.out_dir.string() << "\n";
    for (const auto& o : summary.outcomes) {
        if (!o.ok) std::cout << "  seed " << o.index << " failed: " << o.error << "\n";
    }
    return summary.n_failed == spec.n_seeds ? 1 : 0;
}

int cmd_analyze(const std::string& record_path, const std::string& out_flag) {
    const auto rec = read_record_csv(record_path);
    const auto returns = log_returns(rec.s);
    const auto dir = output_dir(out_flag);
    std::filesystem::create_directories(dir);

    const auto rho_raw = acf(returns, 50);
    std::vector<double> abs_r(returns.size());
    for (std::size_t k = 0; k < returns.size(); ++k) abs_r[k] = std::abs(returns[k]);
    const auto rho_abs = acf(abs_r, 50);
    const auto qq = qq_points(returns);

    nlohmann::ordered_json j;
    j["record"] = record_path;
    j["n_returns"] = returns.size();
    j["excess_kurtosis"] = excess_kurtosis(returns);
    j["clustering_mean_abs_acf"] = abs_acf_mean(returns);
    j["band_fraction"] = acf_band_fraction(returns);
    j["acf_raw"] = rho_raw;
    j["acf_abs"] = rho_abs;
    {
        std::ofstream os(dir / "analysis.json", std::ios::binary);
        os << j.dump(2) << '\n';
    }
    {
        std::ofstream os(dir / "acf.csv", std::ios::binary);
        os << "lag,acf_raw,acf_abs\n";
        for (std::size_t l = 0; l < rho_raw.size(); ++l) {
            os << l << ',' << format_value(rho_raw[l]) << ',' << format_value(rho_abs[l])
               << '\n';
        }
    }
    {
        std::ofstream os(dir / "qq.csv", std::ios::binary);
        os << "theoretical,sample\n";
        for (const auto& pt : qq) {
            os << format_value(pt.theoretical) << ',' << format_value(pt.sample) << '\n';
        }
    }
    std::cout << "analysis written to " << dir.string() << "\n";
    return 0;
}

int cmd_diagnose(const std::string& out_flag) {
    // Verdicts from the deterministic skeleton on reduced grids: steady
    // states, conservation, null-space stasis, dual fixed point, entropy.
    const auto dir = output_dir(out_flag);
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json j;

    auto bundle = load_preset("meanfield");
    ModelParams p = bundle.params;
    GridSpec grid = *bundle.grid;
    grid.n_m = 100;
    grid.n_c = 100;
    const Grid1D g1{grid.m_lo, grid.m_hi, 400};

    {
        FvRunOptions opt;
        opt.deterministic_price = true;
        auto res = run_fv_homogeneous(p, g1, make_uniform_profile(p, g1, 0.0), opt, nullptr);
        nlohmann::ordered_json v;
        v["final_l1_change"] = res.final_l1_change;
        v["mass_drift_rel"] = res.mass_drift_rel;
        v["max_conservation_residual"] = res.max_conservation_residual;
        v["converged"] = res.final_l1_change < 1e-8;
        try {
            v["steady_state"] = to_string(classify_steady_state(
                res.final_field, res.record.s.back(), p, 1e-2, res.final_l1_change));
        } catch (const std::exception& e) {
            v["steady_state_error"] = e.what();
        }
        j["homogeneous_deterministic"] = v;
    }
    {
        FvRunOptions opt;
        opt.deterministic_price = true;
        auto res = run_fv_heterogeneous(p, grid, make_uniform_product_field(p, grid, 0.334),
                                        opt, nullptr);
        nlohmann::ordered_json v;
        v["final_ed"] = res.record.ed.back();
        v["mass_drift_rel"] = res.mass_drift_rel;
        v["max_conservation_residual"] = res.max_conservation_residual;
        try {
            v["steady_state"] = to_string(classify_steady_state(
                res.final_field, res.record.s.back(), p, 1e-2, res.final_l1_change));
        } catch (const std::exception& e) {
            v["steady_state_error"] = e.what();
        }
        j["heterogeneous_deterministic"] = v;
    }
    {
        // constants solve the dual system exactly
        DualProfile term{std::vector<double>(static_cast<std::size_t>(g1.n_m), 1.0),
                         std::vector<double>(static_cast<std::size_t>(g1.n_m), 1.0)};
        auto traj = solve_dual_homogeneous(p, g1, term, 0.01);
        double dev = 0.0;
        for (const auto& prof : traj) {
            for (double v : prof.plus) dev = std::max(dev, std::abs(v - 1.0));
            for (double v : prof.minus) dev = std::max(dev, std::abs(v - 1.0));
        }
        j["dual_constant_fixed_point"] = {{"max_deviation", dev}, {"exact", dev == 0.0}};
    }
    {
        auto K = convex_function(ConvexKind::quadratic);
        auto g0 = make_uniform_profile(p, g1, 0.3);
        DensityField1D p0(g1);
        const double floor_val = 1e-6;
        for (auto& v : p0.plus) v = floor_val;
        for (auto& v : p0.minus) v = floor_val;
        auto base = make_uniform_profile(p, g1, 0.0);
        for (std::size_t k = 0; k < p0.plus.size(); ++k) {
            p0.plus[k] += base.plus[k];
            p0.minus[k] += base.minus[k];
        }
        auto traj = entropy_trajectory_homogeneous(p, g1, g0, p0, 0.02, K);
        double max_rise = 0.0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            max_rise = std::max(max_rise, traj[k] - traj[k - 1]);
        }
        j["entropy_monotone"] = {{"initial", traj.front()},
                                 {"final", traj.back()},
                                 {"max_per_step_rise", max_rise},
                                 {"non_increasing", max_rise <= 1e-10 * (traj.front() + 1.0)}};
    }

    std::ofstream os(dir / "diagnostics.json", std::ios::binary);
    os << j.dump(2) << '\n';
    std::cout << j.dump(2) << "\n";
    std::cout << "verdicts written to " << (dir / "diagnostics.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross market model simulator: threshold agents, kinetic particles, "
                 "and mean-field solvers"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "run one experiment (one or many seeds)");
    std::string preset, tier_str = "abm", arm_str = "full", config_file, out_flag = "out";
    std::vector<std::string> overrides;
    int n_seeds = 1, snapshot_every = 0;
    std::uint64_t master_seed = 42;
    bool det_price = false;
    double initial_ed = 0.0;
    std::string init_kind = "uniform";
    sim->add_option("--preset", preset, "experiment preset (see preset-list)");
    sim->add_option("--tier", tier_str, "abm|kinetic|mf-fv|mf-mc");
    sim->add_option("--arm", arm_str, "full|inaction-only");
    sim->add_option("--config", config_file, "key=value parameter file");
    sim->add_option("--set", overrides, "parameter override key=value (repeatable)");
    sim->add_option("--seeds", n_seeds, "number of seeds");
    sim->add_option("--master-seed", master_seed, "master seed (per-run seeds are split)");
    sim->add_flag("--deterministic-price", det_price, "disable the price noise");
    sim->add_option("--initial-ed", initial_ed, "initial excess demand (mean-field tiers)");
    sim->add_option("--init", init_kind, "uniform|null-support (mean-field tiers)");
    sim->add_option("--snapshot-every", snapshot_every, "density snapshot stride (steps)");
    sim->add_option("--out", out_flag, "output directory (env CROSSIM_OUT overrides)");

    // ---- analyze ----
    auto* ana = app.add_subcommand("analyze", "stylized-fact statistics of a record CSV");
    std::string record_path, ana_out = "analysis";
    ana->add_option("--record", record_path, "record CSV (t,S,ED)")->required();
    ana->add_option("--out", ana_out, "output directory (env CROSSIM_OUT overrides)");

    // ---- diagnose ----
    auto* dia = app.add_subcommand("diagnose", "steady-state / entropy / dual verdicts");
    std::string dia_out = "diagnostics";
    dia->add_option("--out", dia_out, "output directory (env CROSSIM_OUT overrides)");

    // ---- preset-list ----
    app.add_subcommand("preset-list", "list parameter and experiment presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("preset-list")) return cmd_preset_list();
        if (app.got_subcommand("analyze")) return cmd_analyze(record_path, ana_out);
        if (app.got_subcommand("diagnose")) return cmd_diagnose(dia_out);

        ExperimentSpec spec;
        if (!preset.empty()) {
            spec = figure_preset(preset);
        } else {
            spec.tier = parse_tier(tier_str);
            auto bundle = load_preset(spec.tier == Tier::abm        ? "abm-original"
                                      : spec.tier == Tier::kinetic ? "kinetic-particle"
                                                                    : "meanfield");
            spec.params = bundle.params;
            if (bundle.grid) spec.grid = *bundle.grid;
        }
        if (!config_file.empty()) {
            std::ifstream is(config_file, std::ios::binary);
            if (!is) throw std::runtime_error("cannot read config file " + config_file);
            std::stringstream ss;
            ss << is.rdbuf();
            auto bundle = parse_config_text(ss.str());
            spec.params = bundle.params;
            if (bundle.grid) spec.grid = *bundle.grid;
        }
        if (sim->count("--arm")) {
            if (arm_str == "full") spec.arm = PressureArm::full;
            else if (arm_str == "inaction-only") spec.arm = PressureArm::inaction_only;
            else throw std::runtime_error("unknown arm '" + arm_str + "'");
        }
        if (sim->count("--deterministic-price")) spec.deterministic_price = det_price;
        if (sim->count("--initial-ed")) spec.initial_ed = initial_ed;
        if (sim->count("--init")) {
            if (init_kind == "uniform") spec.init = InitKind::uniform;
            else if (init_kind == "null-support") spec.init = InitKind::null_support;
            else throw std::runtime_error("unknown init kind '" + init_kind + "'");
        }
        for (const auto& ov : overrides) {
            auto eq = ov.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("--set expects key=value, got '" + ov + "'");
            }
            apply_override(spec.params, spec.grid, ov.substr(0, eq), ov.substr(eq + 1));
        }
        spec.n_seeds = n_seeds;
        spec.master_seed = master_seed;
        spec.snapshot_every = snapshot_every;
        spec.out_dir = output_dir(out_flag);
        if (spec.name == "custom" && !preset.empty()) spec.name = preset;
        validate(spec.params);
        return cmd_simulate(spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
