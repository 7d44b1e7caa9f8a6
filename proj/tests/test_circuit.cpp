#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include "tsom/circuit.hpp"

using namespace tsom;

namespace {

DendriticFieldParams params_with(double alpha, double b, double c, double radius) {
    DendriticFieldParams p;
    p.alpha = alpha;
    p.b = b;
    p.c = c;
    p.field_radius = radius;
    return p;
}

}  // namespace

TEST_CASE("radial density follows alpha*cos(c*r) + b") {
    const DendriticFieldParams p = params_with(1.0, 2.0, 1.0, 4.0);
    REQUIRE(density(p, 0.0) == Catch::Approx(3.0));            // alpha + b
    REQUIRE(density(p, kPi / 2.0) == Catch::Approx(2.0));      // cosine vanishes
    REQUIRE(density(p, kPi) == Catch::Approx(1.0));            // hand-evaluated
    REQUIRE_THROWS_AS(density(p, -0.1), ValidationError);
    REQUIRE_THROWS_AS(density(p, 5.0), ValidationError);       // outside the field

    // A field whose density would dip negative is rejected at validation.
    REQUIRE_THROWS_AS(density(params_with(2.0, 0.5, 1.0, 4.0), 1.0), ValidationError);
}

TEST_CASE("parent and terminal presence probabilities") {
    const DendriticFieldParams p = params_with(1.0, 1.0, kPi / 8.0, 4.0);
    REQUIRE(parent_probability(p, 1.0, 0.0) == 0.0);  // zero area

    // rho = 2 at r = 0 for alpha = b = 1, so P_c = 0.5 * 2 * 1 = 1.
    REQUIRE(parent_probability(p, 0.0, 1.0) == Catch::Approx(1.0));

    // Centered Gaussian density at offset 0 with unit sigma: 1/sqrt(2*pi).
    REQUIRE(dendrite_presence(p, 0.0, 1.0, 0.0) ==
            Catch::Approx(0.39894228040143268).epsilon(1e-14));
    REQUIRE_THROWS_AS(parent_probability(p, 1.0, -1.0), ValidationError);
}

TEST_CASE("activation count pmf is Poisson") {
    REQUIRE(activation_pmf(1.0, 1) == Catch::Approx(0.36787944117144232).epsilon(1e-14));
    REQUIRE(activation_pmf(2.5, 0) == Catch::Approx(std::exp(-2.5)).epsilon(1e-14));
    REQUIRE(activation_pmf(0.0, 0) == 1.0);
    REQUIRE(activation_pmf(0.0, 3) == 0.0);
    REQUIRE_THROWS_AS(activation_pmf(-1.0, 0), ValidationError);
    REQUIRE_THROWS_AS(activation_pmf(1.0, -1), ValidationError);
}

TEST_CASE("pmf normalizes to 1 within 1e-10") {
    for (double intensity : {0.3, 1.0, 4.0, 12.0}) {
        double sum = 0.0;
        for (int n = 0; n <= 200; ++n) sum += activation_pmf(intensity, n);
        REQUIRE(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("saturating response: value, monotonicity, movement bonus") {
    DendriticFieldParams p;
    p.p_max = 0.5;
    p.tau = 0.020;
    REQUIRE(response(p, 2, p.tau, false) ==
            Catch::Approx(0.63212055882855768).epsilon(1e-14));
    REQUIRE(response(p, 2, p.tau, true) ==
            Catch::Approx(0.63212055882855768 + 0.5).epsilon(1e-14));
    REQUIRE(response(p, 0, p.tau, false) == 0.0);

    double prev = 0.0;
    for (double dt : {0.005, 0.02, 0.1, 1.0}) {
        const double y = response(p, 1, dt, false);
        REQUIRE(y > prev);
        REQUIRE(y < p.p_max + 1e-12);  // saturates at p_max per activation
        prev = y;
    }
}

TEST_CASE("expected effective activations: frozen value and tail bound") {
    DendriticFieldParams p;
    p.p_max = 0.5;
    const SeriesValue sv = expected_extra_activations(p, 1.0, 50);
    // Closed form at intensity 1, p_max 0.5: 1 - 0.5*exp(-0.5).
    REQUIRE(sv.value == Catch::Approx(0.69673467014368329).epsilon(1e-13));
    REQUIRE(sv.tail_bound >= 0.0);
    REQUIRE(sv.tail_bound < 1e-30);

    // Truncation is monotone and bounded by the reported tail.
    const SeriesValue shorter = expected_extra_activations(p, 1.0, 10);
    REQUIRE(shorter.value <= sv.value + 1e-15);
    REQUIRE(sv.value - shorter.value <= shorter.tail_bound);
}

TEST_CASE("energy accumulation recurrence") {
    REQUIRE(accumulate_energy(0.0, 1.0, 0.25) == 0.25);
    REQUIRE(accumulate_energy(1.5, 2.0, 0.5) == 2.5);
    REQUIRE_THROWS_AS(accumulate_energy(0.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("one- vs two-stage expectations on hand instances") {
    TwoStageInstance inst;
    inst.n_subsets = 2;
    inst.p = {0.5, 0.5};
    inst.e = {0.2, 0.4};
    REQUIRE(one_stage(inst) == Catch::Approx(0.3).margin(1e-15));
    REQUIRE(two_stage(inst) == Catch::Approx(0.52).margin(1e-15));

    // Single subset: both reduce to e, margin exactly zero.
    TwoStageInstance single;
    single.n_subsets = 1;
    single.p = {1.0};
    single.e = {0.37};
    REQUIRE(one_stage(single) == Catch::Approx(0.37).margin(1e-15));
    REQUIRE(two_stage(single) == Catch::Approx(0.37).margin(1e-15));

    TwoStageInstance bad = inst;
    bad.p = {0.5, 0.6};
    REQUIRE_THROWS_AS(one_stage(bad), ValidationError);
}

TEST_CASE("dominance holds exhaustively on small grids") {
    // N_d = 2: all e pairs over a 0..1 grid, all binary-split distributions.
    for (int qi = 0; qi <= 10; ++qi)
        for (int ai = 0; ai <= 4; ++ai)
            for (int bi = 0; bi <= 4; ++bi) {
                TwoStageInstance inst;
                inst.n_subsets = 2;
                inst.p = {qi / 10.0, 1.0 - qi / 10.0};
                inst.e = {ai / 4.0, bi / 4.0};
                REQUIRE(one_stage(inst) <= two_stage(inst) + 1e-12);
            }
    // N_d = 3 on a coarser grid.
    const double levels[] = {0.0, 0.5, 1.0};
    for (double e1 : levels)
        for (double e2 : levels)
            for (double e3 : levels)
                for (int q1 = 0; q1 <= 4; ++q1)
                    for (int q2 = 0; q2 + q1 <= 4; ++q2) {
                        TwoStageInstance inst;
                        inst.n_subsets = 3;
                        inst.p = {q1 / 4.0, q2 / 4.0, 1.0 - q1 / 4.0 - q2 / 4.0};
                        inst.e = {e1, e2, e3};
                        REQUIRE(one_stage(inst) <= two_stage(inst) + 1e-12);
                    }
}

TEST_CASE("Monte Carlo verification passes and is seed-deterministic") {
    const TrialReport a = verify_proposition(2000, 1, 20, 99);
    REQUIRE(a.trials == 2000);
    REQUIRE(a.violations == 0);
    REQUIRE(a.passed);
    REQUIRE(a.min_margin >= 0.0);
    REQUIRE_FALSE(a.counterexample.has_value());

    const TrialReport b = verify_proposition(2000, 1, 20, 99);
    REQUIRE(nlohmann::json(a) == nlohmann::json(b));

    const TrialReport c = verify_proposition(2000, 1, 20, 100);
    REQUIRE(nlohmann::json(a) != nlohmann::json(c));
}

TEST_CASE("report serialization carries the run parameters") {
    const TrialReport r = verify_proposition(50, 2, 5, 7);
    const nlohmann::json j = r;
    REQUIRE(j["trials"] == 50);
    REQUIRE(j["n_subsets_range"][0] == 2);
    REQUIRE(j["n_subsets_range"][1] == 5);
    REQUIRE(j["seed"] == 7);
    REQUIRE(j["violations"] == 0);
    REQUIRE(j["passed"] == true);
    REQUIRE(j["counterexample"].is_null());
}
