#include "cross/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cross {

double collision_invariant_residual(const DensityField& f, double s, const RateGrid& rate,
                                    const std::function<double(double, double)>& weight) {
    const auto& g = f.grid;
    const auto dep = deposition_cell(g, s);
    const double area = g.cell_area();
    const double w_dep = weight ? weight(g.m_center(dep.i_m), g.c_center(dep.j_c)) : 1.0;
    double loss_plus = 0.0, loss_minus = 0.0;
    double wloss_plus = 0.0, wloss_minus = 0.0;
    for (int j = 0; j < g.n_c; ++j) {
        for (int i = 0; i < g.n_m; ++i) {
            const std::size_t k = f.index(j, i);
            const double lam = rate.values[k];
            const double w = weight ? weight(g.m_center(i), g.c_center(j)) : 1.0;
            loss_plus += lam * f.plus[k];
            loss_minus += lam * f.minus[k];
            wloss_plus += w * lam * f.plus[k];
            wloss_minus += w * lam * f.minus[k];
        }
    }
    // <w, Qgain[f-] - Qloss[f+]> + <w, Qgain[f+] - Qloss[f-]>
    return (w_dep * loss_minus - wloss_plus) * area + (w_dep * loss_plus - wloss_minus) * area;
}

double collision_loss_flux(const DensityField& f, const RateGrid& rate) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.plus.size(); ++k) {
        s += rate.values[k] * (f.plus[k] + f.minus[k]);
    }
    return s * f.grid.cell_area();
}

bool null_space_membership(std::span<const double> values, std::span<const double> rates,
                           double cell_weight, double tol) {
    double active = 0.0, total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        total += values[k];
        if (rates[k] > tol) active += values[k];
    }
    active *= cell_weight;
    total *= cell_weight;
    if (active == 0.0) return true;  // includes the zero field
    return active < tol * total;
}

std::string to_string(HomoSteadyState s) {
    switch (s) {
        case HomoSteadyState::a_i: return "a-i";
        case HomoSteadyState::a_ii: return "a-ii";
        case HomoSteadyState::b_i: return "b-i";
        case HomoSteadyState::b_ii: return "b-ii";
        case HomoSteadyState::c_i: return "c-i";
        case HomoSteadyState::c_ii: return "c-ii";
    }
    return "?";
}

std::string to_string(HeteroSteadyState s) {
    switch (s) {
        case HeteroSteadyState::A: return "A";
        case HeteroSteadyState::B: return "B";
        case HeteroSteadyState::C: return "C";
    }
    return "?";
}

namespace {

void require_converged(double per_step_l1_change, double tol) {
    if (!(per_step_l1_change < tol)) {
        std::ostringstream os;
        os << "state not converged: per-step L1 change " << per_step_l1_change
           << " >= tolerance " << tol;
        throw NotConverged(os.str());
    }
}

struct SpeciesSummary {
    double mass;
    bool in_null_space;
};

}  // namespace

HomoSteadyState classify_steady_state(const DensityField1D& f, double s,
                                      const ModelParams& p, double tol,
                                      double per_step_l1_change) {
    require_converged(per_step_l1_change, tol);
    const auto rates = homogeneous_rate_profile(p, f.grid, s);
    const double dm = f.grid.dm();
    const SpeciesSummary plus{species_integral(f.plus, dm),
                              null_space_membership(f.plus, rates, dm, tol)};
    const SpeciesSummary minus{species_integral(f.minus, dm),
                               null_space_membership(f.minus, rates, dm, tol)};
    const double total = plus.mass + minus.mass;
    const double ed = plus.mass - minus.mass;
    const double scale = std::max(total, 1.0);

    if (plus.mass <= tol * scale && minus.mass <= tol * scale) return HomoSteadyState::a_i;
    if (!plus.in_null_space || !minus.in_null_space) {
        throw InconsistentSteadyState(
            "a converged state must concentrate on the collision null space");
    }
    if (std::abs(ed) <= tol * scale) return HomoSteadyState::a_ii;
    if (ed < 0.0) {
        return plus.mass <= tol * scale ? HomoSteadyState::b_i : HomoSteadyState::b_ii;
    }
    return minus.mass <= tol * scale ? HomoSteadyState::c_i : HomoSteadyState::c_ii;
}

HeteroSteadyState classify_steady_state(const DensityField& f, double s,
                                        const ModelParams& p, double tol,
                                        double per_step_l1_change) {
    require_converged(per_step_l1_change, tol);
    const RateGrid rate = switching_rate_grid(p, f.grid, s);
    const double area = f.grid.cell_area();
    const SpeciesSummary plus{species_integral(f.plus, area),
                              null_space_membership(f.plus, rate.values, area, tol)};
    const SpeciesSummary minus{species_integral(f.minus, area),
                               null_space_membership(f.minus, rate.values, area, tol)};
    const double total = plus.mass + minus.mass;
    const double ed = plus.mass - minus.mass;
    const double scale = std::max(total, 1.0);

    if (!plus.in_null_space || !minus.in_null_space) {
        throw InconsistentSteadyState(
            "a converged state must concentrate on the collision null space");
    }
    if (std::abs(ed) <= tol * scale) return HeteroSteadyState::A;
    if (ed < 0.0) {
        if (plus.mass > tol * scale) {
            throw InconsistentSteadyState(
                "ED < 0 with surviving long density contradicts the steady-state "
                "restriction (ED must reach -1, 0 or 1)");
        }
        return HeteroSteadyState::B;
    }
    if (minus.mass > tol * scale) {
        throw InconsistentSteadyState(
            "ED > 0 with surviving short density contradicts the steady-state "
            "restriction (ED must reach -1, 0 or 1)");
    }
    return HeteroSteadyState::C;
}

// ---------------------------------------------------------------------------
// dual systems

std::vector<DualProfile> solve_dual_homogeneous(const ModelParams& p, const Grid1D& g,
                                                DualProfile terminal, double horizon,
                                                int n_snapshots) {
    const auto rates = homogeneous_rate_profile(p, g, p.s0);
    const double lambda_max = 1.0 / p.dt_cross;
    const double dt = 0.9 / lambda_max;
    const auto n_steps = static_cast<std::int64_t>(std::ceil(horizon / dt));
    const double dt_eff = horizon / static_cast<double>(n_steps);
    const int dep = deposition_cell(g, p.s0);

    std::vector<DualProfile> traj;
    traj.reserve(static_cast<std::size_t>(n_snapshots));
    traj.push_back(terminal);
    const std::int64_t stride = std::max<std::int64_t>(1, n_steps / (n_snapshots - 1));

    DualProfile psi = std::move(terminal);
    for (std::int64_t k = 0; k < n_steps; ++k) {
        // backward time: d/dtau psi+ = lambda_h(m) (psi-(S) - psi+(m))
        const double at_dep_plus = psi.plus[static_cast<std::size_t>(dep)];
        const double at_dep_minus = psi.minus[static_cast<std::size_t>(dep)];
        for (int i = 0; i < g.n_m; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            const double lam = rates[idx];
            psi.plus[idx] += dt_eff * lam * (at_dep_minus - psi.plus[idx]);
            psi.minus[idx] += dt_eff * lam * (at_dep_plus - psi.minus[idx]);
        }
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            if (traj.size() + 1 < static_cast<std::size_t>(n_snapshots) || k + 1 == n_steps) {
                traj.push_back(psi);
            }
        }
    }
    return traj;
}

std::vector<DualProfile> solve_dual_heterogeneous(const ModelParams& p, const GridSpec& g,
                                                  DualProfile terminal, double horizon,
                                                  double ed, int n_snapshots) {
    const RateGrid rate = switching_rate_grid(p, g, p.s0);
    const double v_plus = shape_positive_part(-ed);
    const double v_minus = shape_positive_part(ed);
    const double v_max = std::max(v_plus, v_minus);
    const double lambda_max = 1.0 / p.dt_cross;
    const double dt = 0.9 / (lambda_max + v_max / g.dc());
    const auto n_steps = static_cast<std::int64_t>(std::ceil(horizon / dt));
    const double dt_eff = horizon / static_cast<double>(n_steps);
    const auto dep = deposition_cell(g, p.s0);
    const std::size_t dep_idx = static_cast<std::size_t>(dep.j_c) * g.n_m + dep.i_m;

    std::vector<DualProfile> traj;
    traj.push_back(terminal);
    const std::int64_t stride = std::max<std::int64_t>(1, n_steps / (n_snapshots - 1));

    DualProfile phi = std::move(terminal);
    const int n_m = g.n_m, n_c = g.n_c;
    // backward time with reversed transport: the advection term carries
    // information downward in c; zero-gradient ghost at the top keeps
    // constants exact.
    auto advect_collide = [&](std::vector<double>& u, double v, double dep_partner) {
        const double nu = v * dt_eff / g.dc();
        for (int j = 0; j < n_c; ++j) {
            double* row = u.data() + static_cast<std::size_t>(j) * n_m;
            const double* up_row =
                j + 1 < n_c ? u.data() + static_cast<std::size_t>(j + 1) * n_m : row;
            for (int i = 0; i < n_m; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n_m + i;
                const double adv = nu * (up_row[i] - row[i]);
                row[i] += adv + dt_eff * rate.values[k] * (dep_partner - row[i]);
            }
        }
    };
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const double dep_plus = phi.plus[dep_idx];
        const double dep_minus = phi.minus[dep_idx];
        advect_collide(phi.plus, v_plus, dep_minus);
        advect_collide(phi.minus, v_minus, dep_plus);
        if ((k + 1) % stride == 0 || k + 1 == n_steps) {
            if (traj.size() + 1 < static_cast<std::size_t>(n_snapshots) || k + 1 == n_steps) {
                traj.push_back(phi);
            }
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// relative entropy

std::function<double(double)> convex_function(ConvexKind kind) {
    switch (kind) {
        case ConvexKind::quadratic:
            return [](double x) { return (x - 1.0) * (x - 1.0); };
        case ConvexKind::xlogx:
            return [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
        case ConvexKind::abs_smoothed:
            return [](double x) {
                constexpr double eps = 1e-3;
                return std::sqrt((x - 1.0) * (x - 1.0) + eps * eps) - eps;
            };
    }
    throw std::invalid_argument("unknown convex function kind");
}

double relative_entropy(std::span<const double> g, std::span<const double> p,
                        std::span<const double> psi, double cell_weight,
                        const std::function<double(double)>& K) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (p[k] <= 0.0) {
            if (g[k] == 0.0) continue;
            throw std::invalid_argument(
                "relative_entropy: reference density vanishes where the solution does not");
        }
        s += psi[k] * p[k] * K(g[k] / p[k]);
    }
    return s * cell_weight;
}

namespace {

double entropy_pair_sum(const std::vector<double>& g_plus, const std::vector<double>& g_minus,
                        const std::vector<double>& p_plus, const std::vector<double>& p_minus,
                        const std::vector<double>& ones, double w,
                        const std::function<double(double)>& K) {
    return relative_entropy(g_plus, p_plus, ones, w, K) +
           relative_entropy(g_minus, p_minus, ones, w, K);
}

}  // namespace

std::vector<double> entropy_trajectory_homogeneous(const ModelParams& p, const Grid1D& g,
                                                   DensityField1D g0, DensityField1D p0,
                                                   double horizon,
                                                   const std::function<double(double)>& K) {
    const auto rates = homogeneous_rate_profile(p, g, p.s0);
    const double dm = g.dm();
    const double dt_safe = 0.9 * p.dt_cross;
    const int n_sub = std::max(1, static_cast<int>(std::ceil(p.dt / dt_safe - 1e-12)));
    const double dt = p.dt / n_sub;
    const auto n_steps = static_cast<std::int64_t>(std::llround(horizon / p.dt));
    const int dep = deposition_cell(g, p.s0);
    const std::vector<double> ones(static_cast<std::size_t>(g.n_m), 1.0);

    std::vector<double> traj;
    traj.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.push_back(entropy_pair_sum(g0.plus, g0.minus, p0.plus, p0.minus, ones, dm, K));

    auto collide = [&](DensityField1D& f) {
        double loss_plus = 0.0, loss_minus = 0.0;
        for (int i = 0; i < g.n_m; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double coeff = dt * rates[k];
            loss_plus += coeff * f.plus[k];
            loss_minus += coeff * f.minus[k];
            f.plus[k] -= coeff * f.plus[k];
            f.minus[k] -= coeff * f.minus[k];
        }
        f.plus[static_cast<std::size_t>(dep)] += loss_minus;
        f.minus[static_cast<std::size_t>(dep)] += loss_plus;
    };

    for (std::int64_t k = 0; k < n_steps; ++k) {
        for (int s = 0; s < n_sub; ++s) {
            collide(g0);
            collide(p0);
        }
        traj.push_back(entropy_pair_sum(g0.plus, g0.minus, p0.plus, p0.minus, ones, dm, K));
    }
    return traj;
}

std::vector<double> entropy_trajectory_heterogeneous(const ModelParams& p, const GridSpec& g,
                                                     DensityField g0, DensityField p0,
                                                     double horizon,
                                                     const std::function<double(double)>& K) {
    const RateGrid rate = switching_rate_grid(p, g, p.s0);
    const double area = g.cell_area();
    const double lambda_max = 1.0 / p.dt_cross;
    const double dt_safe = 0.9 / (lambda_max + 1.0 / g.dc());
    const int n_sub = std::max(1, static_cast<int>(std::ceil(p.dt / dt_safe - 1e-12)));
    const double dt = p.dt / n_sub;
    const auto n_steps = static_cast<std::int64_t>(std::llround(horizon / p.dt));
    const auto dep = deposition_cell(g, p.s0);
    const std::size_t dep_idx = static_cast<std::size_t>(dep.j_c) * g.n_m + dep.i_m;
    const std::vector<double> ones(g.cell_count(), 1.0);
    const int n_m = g.n_m, n_c = g.n_c;

    std::vector<double> traj;
    traj.push_back(entropy_pair_sum(g0.plus, g0.minus, p0.plus, p0.minus, ones, area, K));

    // One explicit substep of transport + collision for a species pair
    // (solution and reference see identical coefficients).
    auto substep_species = [&](std::vector<double>& u, double v, double& loss_dt) {
        const double nu = v * dt / g.dc();
        loss_dt = 0.0;
        for (int j = n_c - 1; j >= 0; --j) {
            double* row = u.data() + static_cast<std::size_t>(j) * n_m;
            const double* up = j > 0 ? row - n_m : nullptr;
            const bool top = (j == n_c - 1);
            for (int i = 0; i < n_m; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n_m + i;
                const double removed = dt * rate.values[k] * row[i];
                const double upv = up ? up[i] : 0.0;
                const double adv = top ? nu * upv : -nu * (row[i] - upv);
                loss_dt += removed;
                row[i] += adv - removed;
            }
        }
    };
    auto substep_field = [&](DensityField& f, double v_plus, double v_minus) {
        double lp = 0.0, lm = 0.0;
        substep_species(f.plus, v_plus, lp);
        substep_species(f.minus, v_minus, lm);
        f.plus[dep_idx] += lm;
        f.minus[dep_idx] += lp;
    };

    for (std::int64_t k = 0; k < n_steps; ++k) {
        for (int s = 0; s < n_sub; ++s) {
            const double ed_g = ed_functional(g0);
            const double v_plus = shape_positive_part(-ed_g);
            const double v_minus = shape_positive_part(ed_g);
            substep_field(g0, v_plus, v_minus);
            substep_field(p0, v_plus, v_minus);
        }
        traj.push_back(entropy_pair_sum(g0.plus, g0.minus, p0.plus, p0.minus, ones, area, K));
    }
    return traj;
}

}  // namespace cross
