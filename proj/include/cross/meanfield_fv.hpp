#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "cross/density.hpp"
#include "cross/market.hpp"
#include "cross/record.hpp"
#include "cross/rng.hpp"
#include "cross/switching.hpp"

namespace cross {

/// Advection speed of the minority species as a function of the signed
/// excess demand; must vanish on (-inf,0], be positive for x>0 and
/// nondecreasing.
using ShapeFunction = std::function<double(double)>;

/// The default shape, H_C(x) = max(x, 0).
double shape_positive_part(double x);

/// Per-cell switching rates lambda(c_j, m_i, s) on a grid, same layout as
/// DensityField.
struct RateGrid {
    std::vector<double> values;
};

RateGrid switching_rate_grid(const ModelParams& p, const GridSpec& g, double s);

/// Homogeneous-model rate profile lambda_h(m) = q(m,s)/dt_cross.
std::vector<double> homogeneous_rate_profile(const ModelParams& p, const Grid1D& g, double s);

struct CellIndex {
    int i_m;
    int j_c;
};

/// Cell containing the re-emission point (s, 0); throws DomainError when s
/// falls outside [m_lo, m_hi).
CellIndex deposition_cell(const GridSpec& g, double s);
int deposition_cell(const Grid1D& g, double s);

/// Collision contribution: loss -lambda*f per cell plus the total lost mass
/// of the opposite species re-emitted into the single cell containing (s,0).
/// Accumulates into dfdt.
void collision_apply(const DensityField& f, const RateGrid& rate, double s, DensityField& dfdt);

/// First-order upwind discretization of the herding transport
/// d_c(H(-ED) f+) and d_c(H(ED) f-). The c-inflow boundary value is zero and
/// the top face is closed (no outflow), so the flux form conserves mass
/// exactly. Accumulates into dfdt.
void advection_apply(const DensityField& f, double ed, const ShapeFunction& H, DensityField& dfdt);

/// Explicit-Euler step bound 0.9 * min(dc / v_max, 1 / lambda_max).
/// Nonpositive v_max or lambda_max drops that term from the bound.
double stable_dt(const GridSpec& g, double v_max, double lambda_max);

/// dED/dt of the collision dynamics: 2 * integral of (f- - f+) lambda.
double ed_rate(const DensityField& f, const RateGrid& rate);

/// One explicit-Euler substep of the heterogeneous system plus the coupled
/// price update. Pass rng = nullptr for the deterministic price skeleton.
/// Diagnostics of the most recent step are kept on the solver.
class HeteroSolver {
public:
    HeteroSolver(const ModelParams& p, const GridSpec& g,
                 ShapeFunction H = shape_positive_part);

    /// Requires dt <= stable_dt(grid, H(1), lambda_max); throws otherwise.
    void step(DensityField& f, MarketState& mkt, double dt, RandomSource* rng);

    double lambda_max() const { return lambda_max_; }
    double v_max() const { return v_max_; }
    /// |mass change| / (dt * total loss flux) of the last step.
    double last_conservation_residual() const { return last_residual_; }
    /// L1 norm of the last step's field change.
    double last_l1_change() const { return last_l1_; }
    /// Mass currently sitting in the top herding row (outflow-forbidden).
    double boundary_row_mass(const DensityField& f) const;

private:
    ModelParams params_;
    GridSpec grid_;
    ShapeFunction shape_;
    double lambda_max_ = 0.0;
    double v_max_ = 0.0;
    std::vector<double> p_row_;     // lambda1 * p(c_j) / dt_cross
    std::vector<double> q_col_dt_;  // dt * lambda2 * q(m_i, s) / dt_cross, rebuilt per step
    double last_residual_ = 0.0;
    double last_l1_ = 0.0;

    double substep_species(std::vector<double>& f, double v, double dt,
                           double& loss_dt_out, double& new_sum_out, double& old_sum_out);
};

/// Homogeneous counterpart (no transport, rate q/dt_cross).
class HomoSolver {
public:
    HomoSolver(const ModelParams& p, const Grid1D& g);

    void step(DensityField1D& f, MarketState& mkt, double dt, RandomSource* rng);

    double lambda_max() const { return lambda_max_; }
    double last_conservation_residual() const { return last_residual_; }
    double last_l1_change() const { return last_l1_; }

private:
    ModelParams params_;
    Grid1D grid_;
    double lambda_max_ = 0.0;
    std::vector<double> rate_;
    double last_residual_ = 0.0;
    double last_l1_ = 0.0;
};

struct FvRunOptions {
    bool deterministic_price = false;
    int snapshot_every = 0;  ///< macro steps between density snapshots (0 = off)
    std::filesystem::path snapshot_dir;
};

struct FvHeteroResult {
    SimulationRecord record;
    DensityField final_field;
    double final_l1_change = 0.0;          ///< per-substep L1 change at the end
    double max_conservation_residual = 0.0;
    double mass_drift_rel = 0.0;           ///< |mass(T)-mass(0)| / mass(0)
    double min_cell_value = 0.0;           ///< sampled at macro steps
};

struct FvHomoResult {
    SimulationRecord record;
    DensityField1D final_field;
    double final_l1_change = 0.0;
    double max_conservation_residual = 0.0;
    double mass_drift_rel = 0.0;
    double min_cell_value = 0.0;
};

/// Runs the heterogeneous system over [0, t_end], recording (t, S, ED) at the
/// macro step dt. Each macro step is divided into equal substeps sized below
/// the combined positivity bound 0.9 / (v_max/dc + lambda_max); substeps also
/// satisfy the stable_dt precondition of HeteroSolver::step.
FvHeteroResult run_fv_heterogeneous(const ModelParams& p, const GridSpec& g,
                                    DensityField init, const FvRunOptions& opt,
                                    RandomSource* rng,
                                    ShapeFunction H = shape_positive_part);

FvHomoResult run_fv_homogeneous(const ModelParams& p, const Grid1D& g, DensityField1D init,
                                const FvRunOptions& opt, RandomSource* rng);

}  // namespace cross
