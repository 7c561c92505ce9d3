#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cross {

/// Scalar parameters shared by every model tier.
///
/// The herding thresholds scale with the characteristic time step:
/// B1 = b1*dt_cross, B2 = b2*dt_cross. dt_cross defaults to dt but is kept
/// separate so the switching rate lambda_P/dt_cross stays fixed when a
/// mean-field run refines dt for convergence studies.
struct ModelParams {
    double kappa = 0.2;       ///< market depth
    double theta = 0.0;       ///< heteroskedasticity scale in the diffusion
    double a1 = 0.1;          ///< lower inaction-threshold bound A1
    double a2 = 0.3;          ///< upper inaction-threshold bound A2
    double b1 = 25.0;         ///< lower herding-threshold rate (1/time)
    double b2 = 100.0;        ///< upper herding-threshold rate (1/time)
    double dt = 4e-5;         ///< time step
    double t_end = 0.4;       ///< horizon
    std::int64_t n_agents = 1000;
    double lambda1 = 0.5;     ///< weight of the herding switch probability
    double lambda2 = 0.5;     ///< weight of the inaction switch probability
    double s0 = 1.0;          ///< initial stock price
    std::uint64_t seed = 42;
    double dt_cross = 4e-5;   ///< characteristic time step of the threshold model

    double herding_lo() const { return b1 * dt_cross; }  ///< B1
    double herding_hi() const { return b2 * dt_cross; }  ///< B2
    std::int64_t step_count() const;
};

/// Uniform cell grid over (m,c) space for the mean-field solvers.
struct GridSpec {
    double m_lo = 0.25;
    double m_hi = 2.5;
    double c_lo = 0.0;
    double c_hi = 8e-3;
    int n_m = 400;
    int n_c = 400;

    double dm() const { return (m_hi - m_lo) / n_m; }
    double dc() const { return (c_hi - c_lo) / n_c; }
    double cell_area() const { return dm() * dc(); }
    double m_center(int i) const { return m_lo + (i + 0.5) * dm(); }
    double c_center(int j) const { return c_lo + (j + 0.5) * dc(); }
    std::size_t cell_count() const { return static_cast<std::size_t>(n_m) * n_c; }
};

/// Every violated invariant, one message per violation (empty when valid).
std::vector<std::string> validation_errors(const ModelParams& p);
std::vector<std::string> validation_errors(const GridSpec& g, const ModelParams& p);

/// Returns its argument unchanged when all invariants hold, otherwise throws
/// std::invalid_argument listing each violated invariant by field name.
const ModelParams& validate(const ModelParams& p);
const GridSpec& validate(const GridSpec& g, const ModelParams& p);

/// Grid sized for the default initial support with wide margins:
/// m in [0.25, 2.5], c in [0, 2*B2], 400x400 cells.
GridSpec default_grid(const ModelParams& p);

struct PresetBundle {
    ModelParams params;
    std::optional<GridSpec> grid;  ///< present for mean-field presets
};

/// Presets: "abm-original", "kinetic-particle", "meanfield".
PresetBundle load_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Flat key=value config text. Keys mirror the field names
/// (kappa, theta, A1, A2, b1, b2, dt, t_end, n_agents, lambda1, lambda2,
/// s0, seed, dt_cross and m_lo, m_hi, c_lo, c_hi, n_m, n_c for the grid).
std::string to_config_text(const ModelParams& p, const GridSpec* grid = nullptr);
PresetBundle parse_config_text(const std::string& text);

/// Applies one "key=value" override; throws on unknown key or bad value.
void apply_override(ModelParams& p, GridSpec& g, std::string_view key,
                    std::string_view value);

}  // namespace cross
