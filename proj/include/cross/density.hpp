#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "cross/params.hpp"

namespace cross {

/// Thrown when the stock price leaves the memory-axis domain, so the
/// re-emission point (S, 0) no longer falls in any grid cell.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class QuadratureRule { midpoint, trapezoid };

/// Memory-axis grid for the space-homogeneous model.
struct Grid1D {
    double m_lo = 0.25;
    double m_hi = 2.5;
    int n_m = 400;

    double dm() const { return (m_hi - m_lo) / n_m; }
    double center(int i) const { return m_lo + (i + 0.5) * dm(); }
};

inline Grid1D m_axis(const GridSpec& g) { return {g.m_lo, g.m_hi, g.n_m}; }

/// Cell averages of the long/short densities on a (m,c) grid.
/// Storage is row-major with the herding index j as the row: value(j,i) =
/// data[j*n_m + i].
struct DensityField {
    GridSpec grid;
    std::vector<double> plus;
    std::vector<double> minus;

    explicit DensityField(const GridSpec& g)
        : grid(g), plus(g.cell_count(), 0.0), minus(g.cell_count(), 0.0) {}
    std::size_t index(int j, int i) const {
        return static_cast<std::size_t>(j) * grid.n_m + i;
    }
};

/// Cell averages of the long/short profiles over the memory axis.
struct DensityField1D {
    Grid1D grid;
    std::vector<double> plus;
    std::vector<double> minus;

    explicit DensityField1D(const Grid1D& g)
        : grid(g),
          plus(static_cast<std::size_t>(g.n_m), 0.0),
          minus(static_cast<std::size_t>(g.n_m), 0.0) {}
};

/// Quadrature of one species over its grid. The midpoint rule is the native
/// pairing for cell averages and is what the solvers use internally; the
/// trapezoid rule treats stored values as point samples at cell centers.
double species_integral(std::span<const double> values, double cell_weight,
                        QuadratureRule rule = QuadratureRule::midpoint, int n_m = 0);

double total_mass(const DensityField& f, QuadratureRule rule = QuadratureRule::midpoint);
double total_mass(const DensityField1D& f, QuadratureRule rule = QuadratureRule::midpoint);

/// ED[f+,f-] = integral of (f+ - f-) over the grid.
double ed_functional(const DensityField& f, QuadratureRule rule = QuadratureRule::midpoint);
double ed_functional(const DensityField1D& f, QuadratureRule rule = QuadratureRule::midpoint);

/// Product of uniform densities Unif(M1(s0), M4(s0)) x Unif(B1, B2) for both
/// species with masses (1+ed0)/2 and (1-ed0)/2.
DensityField make_uniform_product_field(const ModelParams& p, const GridSpec& g, double ed0);
DensityField1D make_uniform_profile(const ModelParams& p, const Grid1D& g, double ed0);

/// Both species uniform over the cells whose center has switching rate
/// exactly zero at price s0 (the null region of the collision operator),
/// masses split according to ed0.
DensityField make_null_support_field(const ModelParams& p, const GridSpec& g, double ed0);
DensityField1D make_null_support_profile(const ModelParams& p, const Grid1D& g, double ed0);

/// Dense CSV grid, one row per herding index, one column per memory index.
void write_density_csv(std::span<const double> values, int n_m, int n_c,
                       const std::filesystem::path& path);

}  // namespace cross
