#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cross/density.hpp"
#include "cross/meanfield_fv.hpp"

namespace cross {

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a converged state contradicts the steady-state restriction
/// (e.g. heterogeneous ED strictly between 0 and +-1 with both species
/// populated).
struct InconsistentSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted collision balance sum over both species:
/// integral of w*(Qgain[f-] - Qloss[f+]) + w*(Qgain[f+] - Qloss[f-]).
/// With w == 1 this is the mass balance and vanishes to rounding; the
/// returned value is not normalized (pair with collision_loss_flux).
double collision_invariant_residual(
    const DensityField& f, double s, const RateGrid& rate,
    const std::function<double(double, double)>& weight = {});

/// Total loss flux of both species, integral of lambda (f+ + f-).
double collision_loss_flux(const DensityField& f, const RateGrid& rate);

/// True when the field's mass concentrates on cells of vanishing rate:
/// mass on {lambda > tol} < tol * total mass. A zero field belongs trivially.
bool null_space_membership(std::span<const double> values, std::span<const double> rates,
                           double cell_weight, double tol);

/// Steady-state taxonomy of the homogeneous model at constant price:
/// a (ED = 0): i both vanish / ii both positive with equal masses;
/// b (ED < 0): i only the short density survives / ii both positive;
/// c (ED > 0): mirror of b. Survivors must sit in the collision null space.
enum class HomoSteadyState { a_i, a_ii, b_i, b_ii, c_i, c_ii };

/// Heterogeneous taxonomy: A (ED = 0, both vanish or balanced in the null
/// space), B (ED < 0, only the short density survives), C (mirror). A mixed
/// state with ED strictly between the extremes is not admissible.
enum class HeteroSteadyState { A, B, C };

std::string to_string(HomoSteadyState s);
std::string to_string(HeteroSteadyState s);

/// Classifies a converged profile; throws NotConverged when the last
/// per-step L1 change is not below tol, InconsistentSteadyState when no
/// admissible case matches.
HomoSteadyState classify_steady_state(const DensityField1D& f, double s,
                                      const ModelParams& p, double tol,
                                      double per_step_l1_change);
HeteroSteadyState classify_steady_state(const DensityField& f, double s,
                                        const ModelParams& p, double tol,
                                        double per_step_l1_change);

// ---------------------------------------------------------------------------
// Dual (backward-in-time) systems at constant price

struct DualProfile {
    std::vector<double> plus;
    std::vector<double> minus;
};

/// Integrates the homogeneous dual system backward from terminal data over
/// [0, horizon] at constant price s0. Returns n_snapshots profiles at evenly
/// spaced times from t = horizon down to t = 0 (terminal profile first).
/// Constant terminal data is reproduced exactly.
std::vector<DualProfile> solve_dual_homogeneous(const ModelParams& p, const Grid1D& g,
                                                DualProfile terminal, double horizon,
                                                int n_snapshots = 11);

/// Heterogeneous analog; ed sets the (frozen) advection speeds via the shape
/// function. The partner dual is evaluated at the re-emission cell (s0, 0).
std::vector<DualProfile> solve_dual_heterogeneous(const ModelParams& p, const GridSpec& g,
                                                  DualProfile terminal, double horizon,
                                                  double ed = 0.0, int n_snapshots = 11);

// ---------------------------------------------------------------------------
// General relative entropy

enum class ConvexKind { quadratic, xlogx, abs_smoothed };

/// K from the catalog: (x-1)^2, x log x (K(0)=0), sqrt((x-1)^2+eps^2)-eps.
std::function<double(double)> convex_function(ConvexKind kind);

/// Quadrature of psi * p * K(g/p); cells with g = 0 contribute psi*p*K(0),
/// cells with p = 0 must have g = 0 (otherwise an error) and contribute 0.
double relative_entropy(std::span<const double> g, std::span<const double> p,
                        std::span<const double> psi, double cell_weight,
                        const std::function<double(double)>& K);

/// Relative entropy sum over both species with psi == 1 (an exact dual
/// solution), sampled once per macro step along the coupled evolution of g
/// and p at frozen price s0. Both fields are propagated with identical
/// coefficients (rates at s0; for the heterogeneous model the advection
/// speeds follow ED[g]), which is the setting of the entropy inequality.
std::vector<double> entropy_trajectory_homogeneous(const ModelParams& p, const Grid1D& g,
                                                   DensityField1D g0, DensityField1D p0,
                                                   double horizon,
                                                   const std::function<double(double)>& K);

std::vector<double> entropy_trajectory_heterogeneous(const ModelParams& p, const GridSpec& g,
                                                     DensityField g0, DensityField p0,
                                                     double horizon,
                                                     const std::function<double(double)>& K);

}  // namespace cross
