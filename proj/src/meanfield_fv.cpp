#include "cross/meanfield_fv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cross {

double shape_positive_part(double x) { return x > 0.0 ? x : 0.0; }

RateGrid switching_rate_grid(const ModelParams& p, const GridSpec& g, double s) {
    RateGrid r;
    r.values.resize(g.cell_count());
    for (int j = 0; j < g.n_c; ++j) {
        const double c = g.c_center(j);
        for (int i = 0; i < g.n_m; ++i) {
            r.values[static_cast<std::size_t>(j) * g.n_m + i] =
                switching_rate(c, g.m_center(i), s, p);
        }
    }
    return r;
}

std::vector<double> homogeneous_rate_profile(const ModelParams& p, const Grid1D& g, double s) {
    std::vector<double> r(static_cast<std::size_t>(g.n_m));
    for (int i = 0; i < g.n_m; ++i) {
        r[static_cast<std::size_t>(i)] = inaction_switch_prob(g.center(i), s, p) / p.dt_cross;
    }
    return r;
}

CellIndex deposition_cell(const GridSpec& g, double s) {
    if (!(s >= g.m_lo && s < g.m_hi)) {
        std::ostringstream os;
        os << "stock price S = " << s << " left the memory domain [" << g.m_lo << ", "
           << g.m_hi << "); the grid is too small for this run";
        throw DomainError(os.str());
    }
    int i = static_cast<int>((s - g.m_lo) / g.dm());
    i = std::clamp(i, 0, g.n_m - 1);
    int j = static_cast<int>((0.0 - g.c_lo) / g.dc());
    j = std::clamp(j, 0, g.n_c - 1);
    return {i, j};
}

int deposition_cell(const Grid1D& g, double s) {
    if (!(s >= g.m_lo && s < g.m_hi)) {
        std::ostringstream os;
        os << "stock price S = " << s << " left the memory domain [" << g.m_lo << ", "
           << g.m_hi << "); the grid is too small for this run";
        throw DomainError(os.str());
    }
    return std::clamp(static_cast<int>((s - g.m_lo) / g.dm()), 0, g.n_m - 1);
}

void collision_apply(const DensityField& f, const RateGrid& rate, double s, DensityField& dfdt) {
    const auto dep = deposition_cell(f.grid, s);
    const std::size_t dep_idx = f.index(dep.j_c, dep.i_m);
    const double area = f.grid.cell_area();
    double loss_plus = 0.0, loss_minus = 0.0;
    for (std::size_t k = 0; k < f.plus.size(); ++k) {
        const double lam = rate.values[k];
        dfdt.plus[k] -= lam * f.plus[k];
        dfdt.minus[k] -= lam * f.minus[k];
        loss_plus += lam * f.plus[k];
        loss_minus += lam * f.minus[k];
    }
    // Dirac approximated by a uniform distribution on the deposition cell:
    // the integrated opposite-species loss flux (loss * area) spread over
    // one cell of that same area.
    dfdt.plus[dep_idx] += loss_minus;
    dfdt.minus[dep_idx] += loss_plus;
}

void advection_apply(const DensityField& f, double ed, const ShapeFunction& H, DensityField& dfdt) {
    const int n_m = f.grid.n_m, n_c = f.grid.n_c;
    const double inv_dc = 1.0 / f.grid.dc();
    const double v_plus = H(-ed);
    const double v_minus = H(ed);
    auto apply = [&](const std::vector<double>& fs, std::vector<double>& out, double v) {
        if (v == 0.0) return;
        const double a = v * inv_dc;
        for (int j = 0; j < n_c; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * n_m;
            const bool top = (j == n_c - 1);
            for (int i = 0; i < n_m; ++i) {
                const double up = (j > 0) ? fs[row - n_m + i] : 0.0;
                // flux form: outflow through the top face of the last row is
                // forbidden, everything else is upwind from below
                out[row + i] += top ? a * up : -a * (fs[row + i] - up);
            }
        }
    };
    apply(f.plus, dfdt.plus, v_plus);
    apply(f.minus, dfdt.minus, v_minus);
}

double stable_dt(const GridSpec& g, double v_max, double lambda_max) {
    double bound = std::numeric_limits<double>::infinity();
    if (v_max > 0.0) bound = std::min(bound, g.dc() / v_max);
    if (lambda_max > 0.0) bound = std::min(bound, 1.0 / lambda_max);
    return 0.9 * bound;
}

double ed_rate(const DensityField& f, const RateGrid& rate) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.plus.size(); ++k) {
        s += (f.minus[k] - f.plus[k]) * rate.values[k];
    }
    return 2.0 * s * f.grid.cell_area();
}

// ---------------------------------------------------------------------------
// HeteroSolver

HeteroSolver::HeteroSolver(const ModelParams& p, const GridSpec& g, ShapeFunction H)
    : params_(validate(p)), grid_(g), shape_(std::move(H)) {
    validate(g, p);
    if (shape_(0.0) != 0.0 || shape_(-1.0) != 0.0 || !(shape_(1.0) >= 0.0)) {
        throw std::invalid_argument("shape function must vanish on (-inf, 0]");
    }
    p_row_.resize(static_cast<std::size_t>(g.n_c));
    for (int j = 0; j < g.n_c; ++j) {
        p_row_[static_cast<std::size_t>(j)] =
            p.lambda1 * herding_switch_prob(g.c_center(j), p) / p.dt_cross;
    }
    q_col_dt_.resize(static_cast<std::size_t>(g.n_m));
    // rates are bounded by (lambda1 + lambda2)/dt_cross = 1/dt_cross
    lambda_max_ = 1.0 / p.dt_cross;
    v_max_ = shape_(1.0);
}

double HeteroSolver::substep_species(std::vector<double>& f, double v, double dt,
                                     double& loss_dt_out, double& new_sum_out,
                                     double& old_sum_out) {
    const int n_m = grid_.n_m, n_c = grid_.n_c;
    const double nu = v * dt / grid_.dc();
    double loss_dt = 0.0, new_sum = 0.0, old_sum = 0.0, l1 = 0.0;
    // Descending row order lets the backward-difference update run in place:
    // row j-1 is still at the old time level when row j is written.
    for (int j = n_c - 1; j >= 0; --j) {
        double* row = f.data() + static_cast<std::size_t>(j) * n_m;
        const double* up = (j > 0) ? row - n_m : nullptr;
        const double dt_p = dt * p_row_[static_cast<std::size_t>(j)];
        const bool top = (j == n_c - 1);
        for (int i = 0; i < n_m; ++i) {
            const double fv = row[i];
            const double removed = (dt_p + q_col_dt_[static_cast<std::size_t>(i)]) * fv;
            const double upv = up ? up[i] : 0.0;
            const double advected = top ? nu * upv : -nu * (fv - upv);
            const double fnew = fv + advected - removed;
            loss_dt += removed;
            old_sum += fv;
            new_sum += fnew;
            l1 += std::abs(fnew - fv);
            row[i] = fnew;
        }
    }
    loss_dt_out = loss_dt;
    new_sum_out = new_sum;
    old_sum_out = old_sum;
    return l1;
}

void HeteroSolver::step(DensityField& f, MarketState& mkt, double dt, RandomSource* rng) {
    if (!(dt > 0.0) || dt > stable_dt(grid_, v_max_, lambda_max_)) {
        std::ostringstream os;
        os << "step size " << dt << " violates the stability bound "
           << stable_dt(grid_, v_max_, lambda_max_);
        throw std::invalid_argument(os.str());
    }
    const auto dep = deposition_cell(grid_, mkt.s);
    const std::size_t dep_idx = f.index(dep.j_c, dep.i_m);
    for (int i = 0; i < grid_.n_m; ++i) {
        q_col_dt_[static_cast<std::size_t>(i)] =
            dt * params_.lambda2 * inaction_switch_prob(grid_.m_center(i), mkt.s, params_) /
            params_.dt_cross;
    }
    const double v_plus = shape_(-mkt.ed);
    const double v_minus = shape_(mkt.ed);

    double loss_dt_plus = 0.0, loss_dt_minus = 0.0;
    double sum_plus = 0.0, sum_minus = 0.0, old_plus = 0.0, old_minus = 0.0;
    double l1 = 0.0;
    l1 += substep_species(f.plus, v_plus, dt, loss_dt_plus, sum_plus, old_plus);
    l1 += substep_species(f.minus, v_minus, dt, loss_dt_minus, sum_minus, old_minus);

    // Re-emission: each species gains exactly what the other lost, as a
    // uniform density on the (S, 0) cell. loss_dt already sums dt*lambda*f
    // over cells, so the lost mass is loss_dt * area and the deposited
    // density increment is exactly loss_dt.
    const double area = grid_.cell_area();
    f.plus[dep_idx] += loss_dt_minus;
    f.minus[dep_idx] += loss_dt_plus;
    sum_plus += loss_dt_minus;
    sum_minus += loss_dt_plus;
    l1 += std::abs(loss_dt_minus) + std::abs(loss_dt_plus);
    last_l1_ = l1 * area;

    const double ed_new = (sum_plus - sum_minus) * area;
    const double exchanged = (loss_dt_plus + loss_dt_minus) * area;
    const double dmass = ((sum_plus + sum_minus) - (old_plus + old_minus)) * area;
    last_residual_ = exchanged > 0.0
                         ? std::abs(dmass) / exchanged
                         : (dmass == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

    mkt.ed_prev = mkt.ed;
    mkt.ed = ed_new;
    mkt.s = rng ? price_step_euler_maruyama(mkt, params_, rng->normal(), dt)
                : price_step_deterministic(mkt, params_);
    mkt.t += dt;
}

double HeteroSolver::boundary_row_mass(const DensityField& f) const {
    const std::size_t row = static_cast<std::size_t>(grid_.n_c - 1) * grid_.n_m;
    double s = 0.0;
    for (int i = 0; i < grid_.n_m; ++i) {
        s += f.plus[row + i] + f.minus[row + i];
    }
    return s * grid_.cell_area();
}

// ---------------------------------------------------------------------------
// HomoSolver

HomoSolver::HomoSolver(const ModelParams& p, const Grid1D& g)
    : params_(validate(p)), grid_(g) {
    if (!(g.m_lo < p.s0 && p.s0 < g.m_hi)) {
        throw std::invalid_argument("s0 must lie strictly inside [m_lo, m_hi]");
    }
    lambda_max_ = 1.0 / p.dt_cross;
    rate_.resize(static_cast<std::size_t>(g.n_m));
}

void HomoSolver::step(DensityField1D& f, MarketState& mkt, double dt, RandomSource* rng) {
    if (!(dt > 0.0) || dt * lambda_max_ > 0.9) {
        throw std::invalid_argument("step size violates the rate stability bound");
    }
    const int dep = deposition_cell(grid_, mkt.s);
    for (int i = 0; i < grid_.n_m; ++i) {
        rate_[static_cast<std::size_t>(i)] =
            inaction_switch_prob(grid_.center(i), mkt.s, params_) / params_.dt_cross;
    }
    double loss_dt_plus = 0.0, loss_dt_minus = 0.0, sum_plus = 0.0, sum_minus = 0.0;
    double old_plus = 0.0, old_minus = 0.0, l1 = 0.0;
    for (int i = 0; i < grid_.n_m; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double coeff = dt * rate_[k];
        const double rp = coeff * f.plus[k];
        const double rm = coeff * f.minus[k];
        old_plus += f.plus[k];
        old_minus += f.minus[k];
        f.plus[k] -= rp;
        f.minus[k] -= rm;
        loss_dt_plus += rp;
        loss_dt_minus += rm;
        sum_plus += f.plus[k];
        sum_minus += f.minus[k];
        l1 += rp + rm;
    }
    const double dm = grid_.dm();
    f.plus[static_cast<std::size_t>(dep)] += loss_dt_minus;
    f.minus[static_cast<std::size_t>(dep)] += loss_dt_plus;
    sum_plus += loss_dt_minus;
    sum_minus += loss_dt_plus;
    l1 += loss_dt_minus + loss_dt_plus;
    last_l1_ = l1 * dm;

    const double exchanged = (loss_dt_plus + loss_dt_minus) * dm;
    const double dmass = ((sum_plus + sum_minus) - (old_plus + old_minus)) * dm;
    last_residual_ = exchanged > 0.0
                         ? std::abs(dmass) / exchanged
                         : (dmass == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

    mkt.ed_prev = mkt.ed;
    mkt.ed = (sum_plus - sum_minus) * dm;
    mkt.s = rng ? price_step_euler_maruyama(mkt, params_, rng->normal(), dt)
                : price_step_deterministic(mkt, params_);
    mkt.t += dt;
}

// ---------------------------------------------------------------------------
// run drivers

namespace {

int substep_count(double dt, double dt_safe) {
    return std::max(1, static_cast<int>(std::ceil(dt / dt_safe - 1e-12)));
}

double min_cell(const std::vector<double>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
}

}  // namespace

FvHeteroResult run_fv_heterogeneous(const ModelParams& p, const GridSpec& g,
                                    DensityField init, const FvRunOptions& opt,
                                    RandomSource* rng, ShapeFunction H) {
    HeteroSolver solver(p, g, std::move(H));
    // Combined positivity bound: a cell may carry the maximal rate and the
    // maximal advection speed at once, so the sub-step obeys the sum of both
    // restrictions (stricter than stable_dt's min of the two).
    const double denom = solver.v_max() / g.dc() + solver.lambda_max();
    const double dt_safe = 0.9 / denom;
    const int n_sub = substep_count(p.dt, dt_safe);
    const double dt_sub = p.dt / n_sub;

    FvHeteroResult out{SimulationRecord{}, std::move(init)};
    RandomSource* price_rng = opt.deterministic_price ? nullptr : rng;
    MarketState mkt{p.s0, ed_functional(out.final_field), 0.0, 0.0};
    mkt.ed_prev = mkt.ed;
    const double mass0 = total_mass(out.final_field);
    out.record.push(0.0, mkt.s, mkt.ed);
    out.min_cell_value = std::min(min_cell(out.final_field.plus), min_cell(out.final_field.minus));

    const auto n_steps = p.step_count();
    bool boundary_warned = false;
    for (std::int64_t k = 0; k < n_steps; ++k) {
        for (int s = 0; s < n_sub; ++s) {
            solver.step(out.final_field, mkt, dt_sub, price_rng);
            out.max_conservation_residual =
                std::max(out.max_conservation_residual, solver.last_conservation_residual());
        }
        mkt.t = static_cast<double>(k + 1) * p.dt;
        out.record.push(mkt.t, mkt.s, mkt.ed);
        out.min_cell_value = std::min(
            out.min_cell_value,
            std::min(min_cell(out.final_field.plus), min_cell(out.final_field.minus)));
        if (!boundary_warned) {
            const double bm = solver.boundary_row_mass(out.final_field);
            if (bm > 1e-6) {
                std::ostringstream os;
                os << "herding boundary row holds mass " << bm << " at t = " << mkt.t
                   << "; enlarge c_hi";
                out.record.warnings.push_back(os.str());
                boundary_warned = true;
            }
        }
        if (opt.snapshot_every > 0 && (k + 1) % opt.snapshot_every == 0) {
            std::ostringstream base;
            base << "density_" << (k + 1);
            write_density_csv(out.final_field.plus, g.n_m, g.n_c,
                              opt.snapshot_dir / (base.str() + "_plus.csv"));
            write_density_csv(out.final_field.minus, g.n_m, g.n_c,
                              opt.snapshot_dir / (base.str() + "_minus.csv"));
        }
    }
    out.final_l1_change = solver.last_l1_change();
    const double mass1 = total_mass(out.final_field);
    out.mass_drift_rel = std::abs(mass1 - mass0) / mass0;
    out.record.info["tier"] = "mf-fv-heterogeneous";
    out.record.info["substeps_per_dt"] = std::to_string(n_sub);
    out.record.info["mass_drift_rel"] = format_value(out.mass_drift_rel);
    out.record.info["max_conservation_residual"] = format_value(out.max_conservation_residual);
    out.record.info["final_l1_change"] = format_value(out.final_l1_change);
    return out;
}

FvHomoResult run_fv_homogeneous(const ModelParams& p, const Grid1D& g, DensityField1D init,
                                const FvRunOptions& opt, RandomSource* rng) {
    HomoSolver solver(p, g);
    const double dt_safe = 0.9 / solver.lambda_max();
    const int n_sub = substep_count(p.dt, dt_safe);
    const double dt_sub = p.dt / n_sub;

    FvHomoResult out{SimulationRecord{}, std::move(init)};
    RandomSource* price_rng = opt.deterministic_price ? nullptr : rng;
    MarketState mkt{p.s0, ed_functional(out.final_field), 0.0, 0.0};
    mkt.ed_prev = mkt.ed;
    const double mass0 = total_mass(out.final_field);
    out.record.push(0.0, mkt.s, mkt.ed);
    out.min_cell_value = std::min(min_cell(out.final_field.plus), min_cell(out.final_field.minus));

    const auto n_steps = p.step_count();
    for (std::int64_t k = 0; k < n_steps; ++k) {
        for (int s = 0; s < n_sub; ++s) {
            solver.step(out.final_field, mkt, dt_sub, price_rng);
            out.max_conservation_residual =
                std::max(out.max_conservation_residual, solver.last_conservation_residual());
        }
        mkt.t = static_cast<double>(k + 1) * p.dt;
        out.record.push(mkt.t, mkt.s, mkt.ed);
        out.min_cell_value = std::min(
            out.min_cell_value,
            std::min(min_cell(out.final_field.plus), min_cell(out.final_field.minus)));
        if (opt.snapshot_every > 0 && (k + 1) % opt.snapshot_every == 0) {
            std::ostringstream base;
            base << "profile_" << (k + 1);
            write_density_csv(out.final_field.plus, g.n_m, 1,
                              opt.snapshot_dir / (base.str() + "_plus.csv"));
            write_density_csv(out.final_field.minus, g.n_m, 1,
                              opt.snapshot_dir / (base.str() + "_minus.csv"));
        }
    }
    out.final_l1_change = solver.last_l1_change();
    const double mass1 = total_mass(out.final_field);
    out.mass_drift_rel = std::abs(mass1 - mass0) / mass0;
    out.record.info["tier"] = "mf-fv-homogeneous";
    out.record.info["substeps_per_dt"] = std::to_string(n_sub);
    out.record.info["mass_drift_rel"] = format_value(out.mass_drift_rel);
    out.record.info["max_conservation_residual"] = format_value(out.max_conservation_residual);
    out.record.info["final_l1_change"] = format_value(out.final_l1_change);
    return out;
}

}  // namespace cross
