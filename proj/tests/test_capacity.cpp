#include <catch2/catch_amalgamated.hpp>

#include "gridcap/gridcap.hpp"
#include "oracles.hpp"

using namespace gridcap;

namespace {

MetricGrid ambient_grid(double h, double half_side = 1.0) {
    SpaceParams sp;
    sp.Q = 2;
    sp.h = h;
    sp.bbox.lo = {-half_side, -half_side, 0.0};
    sp.bbox.hi = {half_side, half_side, 0.0};
    DomainSpec spec{make_disk({0, 0, 0}, 0.9 * half_side), "ambient"};
    return build_grid(spec, sp);
}

CapacityResult ring_capacity(const MetricGrid& g, double r, double R, double p,
                             bool trace = false) {
    CapacityProblem prob;
    prob.grid = &g;
    prob.plate = ball_mask(g, {0, 0, 0}, r);
    prob.env = ball_mask(g, {0, 0, 0}, R);
    prob.p = p;
    prob.record_trace = trace;
    return solve_capacity(prob);
}

} // namespace

TEST_CASE("radial condenser capacity against closed forms") {
    // conformal case Q = p = 2: 2 pi / log(R/r)
    REQUIRE(radial_condenser_capacity(1, 2, 2.0, 2) ==
            Catch::Approx(2 * std::numbers::pi / std::log(2.0)).epsilon(1e-10));
    REQUIRE(radial_condenser_capacity(1, 2, 2.0, 2) ==
            Catch::Approx(9.06472).epsilon(1e-5));
    // Q = p = 3: 4 pi / (log 2)^2
    REQUIRE(radial_condenser_capacity(1, 2, 3.0, 3) ==
            Catch::Approx(4 * std::numbers::pi / std::pow(std::log(2.0), 2))
                .epsilon(1e-10));
    // p < Q power branch against the antiderivative form
    for (double p : {1.2, 1.5, 1.8, 2.5}) {
        REQUIRE(radial_condenser_capacity(0.3, 1.7, p, 2) ==
                Catch::Approx(oracles::radial_capacity_closed_form(0.3, 1.7, p, 2))
                    .epsilon(1e-9));
        REQUIRE(radial_condenser_capacity(0.5, 2.5, p, 3) ==
                Catch::Approx(oracles::radial_capacity_closed_form(0.5, 2.5, p, 3))
                    .epsilon(1e-9));
    }
}

TEST_CASE("radial capacity scales like lambda^(Q-p)") {
    for (double p : {1.5, 2.0, 2.7}) {
        for (double lam : {0.5, 3.0}) {
            double base = radial_condenser_capacity(0.4, 1.1, p, 2);
            double scaled = radial_condenser_capacity(lam * 0.4, lam * 1.1, p, 2);
            REQUIRE(scaled ==
                    Catch::Approx(std::pow(lam, 2.0 - p) * base).epsilon(1e-9));
        }
    }
}

TEST_CASE("sphere area constants") {
    REQUIRE(sphere_area_constant(2) == Catch::Approx(2 * std::numbers::pi));
    REQUIRE(sphere_area_constant(3) == Catch::Approx(4 * std::numbers::pi));
}

TEST_CASE("logarithmic cutoff energy bound at the conformal exponent") {
    // Q = p = 2, rho = 1/e, r = 1: (2 pi / 1) * integral of 1/t = 2 pi
    REQUIRE(log_cutoff_upper_bound(1.0, std::exp(-1.0), 2.0, 2) ==
            Catch::Approx(2 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("discrete ring capacity approaches the radial oracle") {
    auto g = ambient_grid(1.0 / 64);
    auto res = ring_capacity(g, 0.25, 0.5, 2.0);
    REQUIRE(res.converged);
    double oracle = 2 * std::numbers::pi / std::log(2.0);
    REQUIRE(res.value == Catch::Approx(oracle).epsilon(0.15));
}

TEST_CASE("discrete ring capacity at p = 1.5 approaches the radial oracle") {
    auto g = ambient_grid(1.0 / 64);
    auto res = ring_capacity(g, 0.25, 0.5, 1.5);
    REQUIRE(res.converged);
    double oracle = oracles::radial_capacity_closed_form(0.25, 0.5, 1.5, 2);
    REQUIRE(res.value == Catch::Approx(oracle).epsilon(0.15));
}

TEST_CASE("ring capacity is stable under one refinement") {
    auto g1 = ambient_grid(1.0 / 64);
    auto g2 = ambient_grid(1.0 / 128);
    double c1 = ring_capacity(g1, 0.25, 0.5, 2.0).value;
    double c2 = ring_capacity(g2, 0.25, 0.5, 2.0).value;
    REQUIRE(c2 == Catch::Approx(c1).epsilon(0.025));
}

TEST_CASE("energy scales exactly like h^(Q-p) under joint rescaling") {
    // doubling both the geometry and the spacing keeps the combinatorics
    // identical, so the value scales by 2^(Q-p) up to solver stopping noise
    auto g1 = ambient_grid(1.0 / 32, 1.0);
    auto g2 = ambient_grid(1.0 / 16, 2.0);
    for (double p : {2.0, 1.5}) {
        double c1 = ring_capacity(g1, 0.25, 0.5, p).value;
        double c2 = ring_capacity(g2, 0.5, 1.0, p).value;
        REQUIRE(c2 == Catch::Approx(std::pow(2.0, 2.0 - p) * c1).epsilon(1e-6));
    }
}

TEST_CASE("capacity is monotone in the plate and antitone in the environment") {
    auto g = ambient_grid(1.0 / 32);
    double small_plate = ring_capacity(g, 0.2, 0.6, 2.0).value;
    double big_plate = ring_capacity(g, 0.3, 0.6, 2.0).value;
    REQUIRE(small_plate < big_plate);
    double big_env = ring_capacity(g, 0.2, 0.7, 2.0).value;
    REQUIRE(big_env < small_plate);
}

TEST_CASE("potential obeys the maximum principle") {
    auto g = ambient_grid(1.0 / 32);
    CapacityProblem prob;
    prob.grid = &g;
    prob.plate = ball_mask(g, {0.1, 0, 0}, 0.15);
    prob.env = ball_mask(g, {0, 0, 0}, 0.55);
    auto res = solve_capacity(prob);
    REQUIRE(res.converged);
    for (auto c : prob.plate.cells) REQUIRE(res.potential[c] == 1.0);
    for (double v : res.potential) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
    // support confined to the environment
    for (int64_t c = 0; c < g.cell_count(); ++c)
        if (!prob.env.contains(c)) REQUIRE(res.potential[c] == 0.0);
}

TEST_CASE("descent trace is recorded and non-increasing") {
    auto g = ambient_grid(1.0 / 32);
    auto res = ring_capacity(g, 0.25, 0.5, 1.5, true);
    REQUIRE(!res.trace.empty());
    for (size_t k = 0; k + 1 < res.trace.size(); ++k)
        REQUIRE(res.trace[k + 1] <= res.trace[k] * (1 + 1e-12));
}

TEST_CASE("plate outside the environment is rejected") {
    auto g = ambient_grid(1.0 / 32);
    CapacityProblem prob;
    prob.grid = &g;
    prob.plate = ball_mask(g, {0.6, 0, 0}, 0.05);
    prob.env = ball_mask(g, {0, 0, 0}, 0.3);
    REQUIRE_THROWS_WITH(solve_capacity(prob),
                        Catch::Matchers::ContainsSubstring(
                            "plate escapes environment"));
}

TEST_CASE("exponent validation") {
    auto g = ambient_grid(1.0 / 32);
    CapacityProblem prob;
    prob.grid = &g;
    prob.plate = ball_mask(g, {0, 0, 0}, 0.2);
    prob.env = ball_mask(g, {0, 0, 0}, 0.5);
    prob.p = 1.0;
    REQUIRE_THROWS_AS(solve_capacity(prob), std::invalid_argument);
}

TEST_CASE("single-cell plate capacity decreases under refinement") {
    std::vector<double> caps;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto g = ambient_grid(h);
        CapacityProblem prob;
        prob.grid = &g;
        SetMask plate;
        plate.cells = {g.containing_cell({0, 0, 0})};
        prob.plate = plate;
        prob.env = ball_mask(g, {0, 0, 0}, 0.5);
        caps.push_back(solve_capacity(prob).value);
    }
    REQUIRE(caps[1] < caps[0]);
    REQUIRE(caps[2] < caps[1]);
}

TEST_CASE("plate equal to environment reduces to the indicator energy") {
    auto g = ambient_grid(1.0 / 16);
    CapacityProblem prob;
    prob.grid = &g;
    SetMask cell;
    cell.cells = {g.containing_cell({0, 0, 0})};
    prob.plate = cell;
    prob.env = cell;
    auto res = solve_capacity(prob);
    REQUIRE(res.converged);
    // one interior cell at p = Q = 2: two outgoing faces contribute 2,
    // two incoming faces contribute 1 each
    REQUIRE(res.value == 4.0);
}
