#include <doctest.h>

#include "cross/kinetic.hpp"

using namespace cross;

namespace {

ModelParams kinetic_params() { return load_preset("kinetic-particle").params; }

}  // namespace

TEST_CASE("kinetic initialization follows the table") {
    ModelParams p = kinetic_params();
    RandomSource rng(1);
    auto e = init_kinetic_ensemble(p, rng);
    REQUIRE(e.size() == 30000);
    CHECK(e.long_count == 20000);
    CHECK(e.ed() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(e.c[i] == p.herding_lo());
        CHECK(e.m[i] == p.s0);
    }
}

TEST_CASE("zero switching probability freezes the excess demand") {
    // lambda1 = 0 removes the herding channel; a very wide inaction band
    // keeps q at zero for every price the run can reach
    ModelParams p = kinetic_params();
    p.n_agents = 2000;
    p.lambda1 = 0.0;
    p.lambda2 = 1.0;
    p.a1 = 5.0;
    p.a2 = 6.0;
    p.t_end = p.dt * 2000;
    RandomSource rng(5);
    auto rec = run_kinetic_particle(p, PressureArm::full, rng);
    for (double ed : rec.ed) CHECK(ed == rec.ed.front());
}

TEST_CASE("the preset initialization cannot switch on the first step") {
    ModelParams p = kinetic_params();
    p.t_end = p.dt;  // single step
    RandomSource rng(6);
    auto rec = run_kinetic_particle(p, PressureArm::full, rng);
    REQUIRE(rec.size() == 2);
    // p(B1) = 0 and q(S0, S1) = 0 for the small first-step price move
    CHECK(rec.ed[1] == rec.ed[0]);
}

TEST_CASE("kinetic runs are reproducible per seed") {
    ModelParams p = kinetic_params();
    p.n_agents = 3000;
    p.t_end = p.dt * 300;
    RandomSource r1(42), r2(42);
    auto a = run_kinetic_particle(p, PressureArm::full, r1);
    auto b = run_kinetic_particle(p, PressureArm::full, r2);
    CHECK(a.s == b.s);
    CHECK(a.ed == b.ed);
}

TEST_CASE("inaction-only arm never consults the herding pressure") {
    ModelParams p = kinetic_params();
    p.n_agents = 2000;
    p.t_end = p.dt * 500;
    RandomSource r1(11), r2(11);
    auto e1 = init_kinetic_ensemble(p, r1);
    auto e2 = init_kinetic_ensemble(p, r2);
    for (auto& c : e2.c) c = 100.0;  // p(c) = 1 everywhere if it were read
    MarketState m1{p.s0, e1.ed(), e1.ed(), 0.0};
    MarketState m2{p.s0, e2.ed(), e2.ed(), 0.0};
    for (int k = 0; k < 500; ++k) {
        kinetic_step(e1, m1, p, PressureArm::inaction_only, r1);
        kinetic_step(e2, m2, p, PressureArm::inaction_only, r2);
        CHECK(m1.ed == m2.ed);
    }
}

TEST_CASE("switch resets memory and pressure") {
    ModelParams p = kinetic_params();
    p.n_agents = 64;
    // force certain switching: herding pressure far above B2
    RandomSource rng(13);
    auto e = init_kinetic_ensemble(p, rng);
    for (auto& c : e.c) c = 1.0;
    MarketState mkt{p.s0, e.ed(), e.ed(), 0.0};
    kinetic_step(e, mkt, p, PressureArm::full, rng);
    // lambda_P = lambda1 * 1 + lambda2 * 0 = 0.5: about half switch
    int switched = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e.c[i] == 0.0) {
            ++switched;
            CHECK(e.m[i] == mkt.s);
        }
    }
    CHECK(switched > 10);
    CHECK(switched < 54);
}
