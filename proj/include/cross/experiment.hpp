#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cross/params.hpp"
#include "cross/record.hpp"
#include "cross/switching.hpp"

namespace cross {

enum class Tier { abm, kinetic, mf_fv, mf_mc };

enum class InitKind { uniform, null_support };

std::string to_string(Tier t);

/// One batch experiment: a tier, its arm flags, parameters and seeds.
/// For the mean-field tiers the arm selects the model variant:
/// inaction_only runs the space-homogeneous system, full the heterogeneous
/// one. initial_ed and init apply to the mean-field tiers only (the
/// microscopic tiers initialize from the parameter tables).
struct ExperimentSpec {
    std::string name = "custom";
    Tier tier = Tier::abm;
    PressureArm arm = PressureArm::full;
    bool deterministic_price = false;
    InitKind init = InitKind::uniform;
    double initial_ed = 0.0;
    ModelParams params;
    GridSpec grid;
    std::uint64_t master_seed = 42;
    int n_seeds = 1;
    std::filesystem::path out_dir = "out";
    int snapshot_every = 0;

    /// Tier-flag consistency problems (empty when valid).
    std::vector<std::string> flag_errors() const;
};

/// Named experiment presets, one per reference scenario; see
/// figure_preset_names() for the list.
ExperimentSpec figure_preset(std::string_view name);
std::vector<std::string> figure_preset_names();

/// One simulation for the given seed (no files written).
SimulationRecord run_single(const ExperimentSpec& spec, std::uint64_t seed);

struct SeedOutcome {
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::string record_file;
    double excess_kurtosis = 0.0;
    double clustering = 0.0;      ///< mean |r| ACF over lags 1..50
    double band_fraction = 0.0;   ///< raw ACF within +-2/sqrt(n), lags 1..50
};

struct ExperimentSummary {
    std::vector<SeedOutcome> outcomes;
    int n_failed = 0;
    double kurtosis_mean = 0.0;
    double kurtosis_median = 0.0;
    double kurtosis_stddev = 0.0;
    double clustering_mean = 0.0;
    std::vector<double> pooled_acf_raw;  ///< per-lag mean over seeds, lags 0..50
    std::vector<double> pooled_acf_abs;
};

/// Runs every seed (master seed split by run index) on a small worker pool,
/// writes one record CSV per seed plus summary.json into spec.out_dir, and
/// returns the aggregate. Outputs are byte-stable across repeated runs.
/// Seeds whose solver aborts are recorded as failed; throws only if every
/// seed fails.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

}  // namespace cross
