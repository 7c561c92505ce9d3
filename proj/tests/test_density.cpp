#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cross/density.hpp"
#include "cross/switching.hpp"

using namespace cross;

namespace {

ModelParams mf_params() { return load_preset("meanfield").params; }

GridSpec small_grid(const ModelParams& p) {
    GridSpec g = default_grid(p);
    g.n_m = 40;
    g.n_c = 20;
    return g;
}

}  // namespace

TEST_CASE("ed functional on synthetic fields") {
    ModelParams p = mf_params();
    GridSpec g = small_grid(p);
    DensityField f(g);

    // equal species cancel exactly
    for (std::size_t k = 0; k < f.plus.size(); ++k) f.plus[k] = f.minus[k] = 0.3;
    CHECK(ed_functional(f) == 0.0);

    // one species of unit mass
    DensityField one(g);
    const double value = 1.0 / (static_cast<double>(g.cell_count()) * g.cell_area());
    for (auto& v : one.plus) v = value;
    CHECK(ed_functional(one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_mass(one) == doctest::Approx(1.0).epsilon(1e-12));

    // uniform blocks of mass 0.667 and 0.333: quadrature evaluated by hand
    DensityField blocks(g);
    const auto n_cells = static_cast<double>(g.cell_count());
    for (auto& v : blocks.plus) v = 0.667 / (n_cells * g.cell_area());
    for (auto& v : blocks.minus) v = 0.333 / (n_cells * g.cell_area());
    CHECK(ed_functional(blocks) == doctest::Approx(0.334).epsilon(1e-12));
}

TEST_CASE("trapezoid flag reweights the boundary cells") {
    ModelParams p = mf_params();
    GridSpec g = small_grid(p);
    DensityField f(g);
    for (auto& v : f.plus) v = 1.0;
    const double mid = species_integral(f.plus, g.cell_area(), QuadratureRule::midpoint, g.n_m);
    const double trap = species_integral(f.plus, g.cell_area(), QuadratureRule::trapezoid, g.n_m);
    CHECK(mid == doctest::Approx(static_cast<double>(g.cell_count()) * g.cell_area()));
    // trapezoid over constant data counts half weights on the boundary ring
    const double expected = (g.n_m - 1.0) * (g.n_c - 1.0) * g.cell_area();
    CHECK(trap == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uniform product initialization hits the requested masses") {
    ModelParams p = mf_params();
    GridSpec g = default_grid(p);
    auto f = make_uniform_product_field(p, g, 0.334);
    const double area = g.cell_area();
    CHECK(species_integral(f.plus, area) == doctest::Approx(0.667).epsilon(1e-12));
    CHECK(species_integral(f.minus, area) == doctest::Approx(0.333).epsilon(1e-12));
    CHECK(ed_functional(f) == doctest::Approx(0.334).epsilon(1e-12));

    // support stays inside the declared box
    for (int j = 0; j < g.n_c; ++j) {
        for (int i = 0; i < g.n_m; ++i) {
            if (f.plus[f.index(j, i)] > 0.0) {
                CHECK(g.m_center(i) > p.s0 / (1.0 + p.a2));
                CHECK(g.m_center(i) < p.s0 * (1.0 + p.a2));
                CHECK(g.c_center(j) > p.herding_lo());
                CHECK(g.c_center(j) < p.herding_hi());
            }
        }
    }
}

TEST_CASE("null-support initialization only occupies rate-free cells") {
    ModelParams p = mf_params();
    GridSpec g = default_grid(p);
    auto f = make_null_support_field(p, g, 0.01);
    CHECK(total_mass(f) == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < g.n_c; ++j) {
        for (int i = 0; i < g.n_m; ++i) {
            if (f.plus[f.index(j, i)] > 0.0 || f.minus[f.index(j, i)] > 0.0) {
                CHECK(switching_rate(g.c_center(j), g.m_center(i), p.s0, p) == 0.0);
            }
        }
    }

    auto prof = make_null_support_profile(p, m_axis(g), 0.0);
    CHECK(total_mass(prof) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < g.n_m; ++i) {
        if (prof.plus[static_cast<std::size_t>(i)] > 0.0) {
            CHECK(inaction_switch_prob(m_axis(g).center(i), p.s0, p) == 0.0);
        }
    }
}

TEST_CASE("density snapshots are dense row-per-c CSV grids") {
    ModelParams p = mf_params();
    GridSpec g = small_grid(p);
    DensityField f(g);
    f.plus[f.index(3, 7)] = 1.25;
    const auto path = std::filesystem::temp_directory_path() / "cross_density_test.csv";
    write_density_csv(f.plus, g.n_m, g.n_c, path);
    std::ifstream is(path);
    std::string line;
    int rows = 0, hit_row = -1;
    while (std::getline(is, line)) {
        if (line.find("1.25") != std::string::npos) hit_row = rows;
        ++rows;
    }
    CHECK(rows == g.n_c);
    CHECK(hit_row == 3);
    std::filesystem::remove(path);
}
