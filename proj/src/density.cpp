#include "cross/density.hpp"

#include <fstream>

#include "cross/record.hpp"
#include "cross/switching.hpp"

namespace cross {

double species_integral(std::span<const double> values, double cell_weight,
                        QuadratureRule rule, int n_m) {
    if (rule == QuadratureRule::midpoint || values.empty()) {
        double s = 0.0;
        for (double v : values) s += v;
        return s * cell_weight;
    }
    // Trapezoid over cell-center point values. For 2-D data n_m gives the row
    // length; end weights are halved along each axis.
    if (n_m <= 0) n_m = static_cast<int>(values.size());
    const int n_c = static_cast<int>(values.size()) / n_m;
    double s = 0.0;
    for (int j = 0; j < n_c; ++j) {
        const double wj = (n_c == 1 || (j > 0 && j < n_c - 1)) ? 1.0 : 0.5;
        for (int i = 0; i < n_m; ++i) {
            const double wi = (i > 0 && i < n_m - 1) ? 1.0 : 0.5;
            s += wj * wi * values[static_cast<std::size_t>(j) * n_m + i];
        }
    }
    return s * cell_weight;
}

double total_mass(const DensityField& f, QuadratureRule rule) {
    return species_integral(f.plus, f.grid.cell_area(), rule, f.grid.n_m) +
           species_integral(f.minus, f.grid.cell_area(), rule, f.grid.n_m);
}

double total_mass(const DensityField1D& f, QuadratureRule rule) {
    return species_integral(f.plus, f.grid.dm(), rule) +
           species_integral(f.minus, f.grid.dm(), rule);
}

double ed_functional(const DensityField& f, QuadratureRule rule) {
    return species_integral(f.plus, f.grid.cell_area(), rule, f.grid.n_m) -
           species_integral(f.minus, f.grid.cell_area(), rule, f.grid.n_m);
}

double ed_functional(const DensityField1D& f, QuadratureRule rule) {
    return species_integral(f.plus, f.grid.dm(), rule) -
           species_integral(f.minus, f.grid.dm(), rule);
}

namespace {

void fill_normalized(std::vector<double>& plus, std::vector<double>& minus,
                     const std::vector<std::size_t>& support, double cell_weight,
                     double ed0) {
    if (support.empty()) {
        throw std::invalid_argument("initial density support contains no grid cell");
    }
    const double value = 1.0 / (static_cast<double>(support.size()) * cell_weight);
    for (auto idx : support) {
        plus[idx] = value * 0.5 * (1.0 + ed0);
        minus[idx] = value * 0.5 * (1.0 - ed0);
    }
}

}  // namespace

DensityField make_uniform_product_field(const ModelParams& p, const GridSpec& g, double ed0) {
    DensityField f(g);
    const double m_lo = p.s0 / (1.0 + p.a2);
    const double m_hi = p.s0 * (1.0 + p.a2);
    const double c_lo = p.herding_lo();
    const double c_hi = p.herding_hi();
    std::vector<std::size_t> support;
    for (int j = 0; j < g.n_c; ++j) {
        const double c = g.c_center(j);
        if (!(c > c_lo && c < c_hi)) continue;
        for (int i = 0; i < g.n_m; ++i) {
            const double m = g.m_center(i);
            if (m > m_lo && m < m_hi) support.push_back(f.index(j, i));
        }
    }
    fill_normalized(f.plus, f.minus, support, g.cell_area(), ed0);
    return f;
}

DensityField1D make_uniform_profile(const ModelParams& p, const Grid1D& g, double ed0) {
    DensityField1D f(g);
    const double m_lo = p.s0 / (1.0 + p.a2);
    const double m_hi = p.s0 * (1.0 + p.a2);
    std::vector<std::size_t> support;
    for (int i = 0; i < g.n_m; ++i) {
        const double m = g.center(i);
        if (m > m_lo && m < m_hi) support.push_back(static_cast<std::size_t>(i));
    }
    fill_normalized(f.plus, f.minus, support, g.dm(), ed0);
    return f;
}

DensityField make_null_support_field(const ModelParams& p, const GridSpec& g, double ed0) {
    DensityField f(g);
    std::vector<std::size_t> support;
    for (int j = 0; j < g.n_c; ++j) {
        for (int i = 0; i < g.n_m; ++i) {
            if (switching_rate(g.c_center(j), g.m_center(i), p.s0, p) == 0.0) {
                support.push_back(f.index(j, i));
            }
        }
    }
    fill_normalized(f.plus, f.minus, support, g.cell_area(), ed0);
    return f;
}

DensityField1D make_null_support_profile(const ModelParams& p, const Grid1D& g, double ed0) {
    DensityField1D f(g);
    std::vector<std::size_t> support;
    for (int i = 0; i < g.n_m; ++i) {
        if (inaction_switch_prob(g.center(i), p.s0, p) == 0.0) {
            support.push_back(static_cast<std::size_t>(i));
        }
    }
    fill_normalized(f.plus, f.minus, support, g.dm(), ed0);
    return f;
}

void write_density_csv(std::span<const double> values, int n_m, int n_c,
                       const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    for (int j = 0; j < n_c; ++j) {
        for (int i = 0; i < n_m; ++i) {
            if (i) os << ',';
            os << format_value(values[static_cast<std::size_t>(j) * n_m + i]);
        }
        os << '\n';
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace cross
