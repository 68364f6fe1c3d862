#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lvdiff/errors.hpp"
#include "lvdiff/leslie_gower.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/scenarios.hpp"

using namespace lvdiff;

namespace {

const Grid kGrid = Grid::line(1.0, 129);

struct Fixture {
    RatePair rp = standard_pair(kGrid);
    AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

}  // namespace

TEST_CASE("invariant region and comparison constants") {
    LeslieGowerParams p = scenarios::c1(fx().rp, fx().ab);
    p.b1 = 2.0;
    p.k1 = 0.5;
    const InvariantRegion a = invariant_region(p);
    CHECK(a.M1 == doctest::Approx(1.5));
    CHECK(a.u_cap == doctest::Approx(0.75));
    CHECK(a.v_cap == doctest::Approx((1.5 + 2.0 * p.k2) * 1.5 / (p.a2 * 2.0)));
    const SandwichConstants c = sandwich_constants(p);
    CHECK(c.gamma11 / c.eta11 == doctest::Approx(p.ratio()));
    CHECK(c.gamma12 < c.gamma11);
    CHECK(c.eta12 < c.eta11);

    p.a2 = -1.0;
    CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("hypothesis classification") {
    const auto& f = fx();
    const auto c1 = check_conditions(scenarios::c1(f.rp, f.ab), f.ab);
    CHECK(c1.C1);
    CHECK_FALSE(c1.C2);
    CHECK_FALSE(c1.C3);
    CHECK(c1.region == Region::D_plus);

    const auto c2 = check_conditions(scenarios::c2(f.rp, f.ab), f.ab);
    CHECK(c2.C2);
    CHECK(c2.region == Region::D_plus);

    const auto a1p = scenarios::a1(f.rp, f.ab);
    const auto a1 = check_conditions(a1p, f.ab);
    CHECK(a1.A1);
    CHECK(a1.C3);
    CHECK_FALSE(a1.A2);
    CHECK(a1.region == Region::D_minus);
    // Classification is a pure function of its inputs.
    const auto again = check_conditions(a1p, f.ab);
    CHECK(again.to_json() == a1.to_json());

    const auto c3 = check_conditions(scenarios::c3(f.rp.r2));
    CHECK(c3.C3);
    CHECK(c3.excluded);
    CHECK_FALSE(c3.A1);
    CHECK(c3.region == Region::D_zero);

    // Endpoint slack: ratio exactly at beta counts as C1 with k1 = k2.
    LeslieGowerParams q = scenarios::c1(f.rp, f.ab);
    q.a1 = f.ab.beta;
    CHECK(check_conditions(q, f.ab).C1);
    q.k1 = 0.5;
    q.a1 = f.ab.beta * q.k1 / q.k2 * 0.99;
    CHECK_FALSE(check_conditions(q, f.ab).C1);
}

TEST_CASE("trajectories respect the invariant region") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::c2(f.rp, f.ab);
    const InvariantRegion a = invariant_region(p);
    const ScalarField z = ScalarField::constant(kGrid, 0.0);
    const auto still = simulate_mlg(p, z, z, 5.0);
    CHECK(norm_inf(still.U) == 0.0);
    CHECK(norm_inf(still.V) == 0.0);

    Rng rng(3);
    for (int k = 0; k < 4; ++k) {
        const ScalarField u0 = random_positive_field(kGrid, rng, 0.0, a.u_cap);
        const ScalarField v0 = random_positive_field(kGrid, rng, 0.0, a.v_cap);
        const auto tr = simulate_mlg(p, u0, v0, 50.0);
        CHECK(tr.started_inside);
        CHECK_FALSE(tr.left_region);
        CHECK(tr.max_excursion <= 1e-12 * std::max(1.0, a.v_cap));
        CHECK(envelope_check(p, tr).ok);
    }
}

TEST_CASE("envelopes") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::c1(f.rp, f.ab);
    const InvariantRegion a = invariant_region(p);
    CHECK(envelope_u(a, p.b1, 0.2, 0.0) == doctest::Approx(0.2));
    CHECK(envelope_u(a, p.b1, 0.2, 1e3) == doctest::Approx(a.u_cap));
    CHECK(envelope_v(a, 0.3, 0.0) == doctest::Approx(0.3));
    CHECK(envelope_v(a, 0.3, 1e3) == doctest::Approx(a.v_cap));
    // Logistic ODE check by central differences.
    const double t = 0.7, h = 1e-5;
    const double u = envelope_u(a, p.b1, 0.2, t);
    const double du = (envelope_u(a, p.b1, 0.2, t + h) - envelope_u(a, p.b1, 0.2, t - h)) / (2 * h);
    CHECK(du == doctest::Approx(u * (a.M1 - p.b1 * u)).epsilon(1e-7));
}

TEST_CASE("sandwich ordering") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::a1(f.rp, f.ab);
    Rng rng(4);
    const InvariantRegion a = invariant_region(p);
    const ScalarField u0 = random_positive_field(kGrid, rng, 0.05 * a.u_cap, a.u_cap);
    const ScalarField v0 = random_positive_field(kGrid, rng, 0.05 * a.v_cap, a.v_cap);
    const SandwichReport s = run_sandwich(p, u0, v0, 100.0);
    CHECK(s.ordering_ok);
    CHECK(s.max_violation <= 1e-9);

    // With k1 = k2 both comparison systems share the prey limit.
    LeslieGowerParams q = p;
    q.k2 = q.k1;
    q.a1 = 0.5 * f.ab.alpha;
    const SandwichReport e = run_sandwich(q, u0, v0, 200.0, {}, 1e-9, false);
    REQUIRE(e.limits[0]);
    REQUIRE(e.limits[1]);
    CHECK(distance_inf(e.limits[0]->first, e.limits[1]->first) <= 1e-12);
}

TEST_CASE("persistence") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::a1(f.rp, f.ab);
    const double delta = persistence_delta(p);
    CHECK(delta > 0.0);
    const PersistenceReport r = persistence_floor(p, 3, 100.0, 11, 1);
    CHECK(r.rows.size() == 3);
    CHECK(r.ok);
    for (const auto& row : r.rows) {
        CHECK(row.floor_u >= delta);
        CHECK(row.floor_v >= delta);
    }
    CHECK_THROWS_AS(persistence_floor(p, 0, 10.0, 1), PreconditionError);
}

TEST_CASE("coexistence pair") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::a2_flat_prey(f.rp.r2, 1.0);
    const CoexistencePair cp = coexistence_pair(p, 2, 300.0, 5);
    CHECK(cp.residual_ok);
    CHECK(distance_inf(cp.U.combined(), ScalarField::constant(kGrid, 1.0)) <= 1e-9);
    const ScalarField v = cp.v.combined();
    CHECK(inf_field(v) >= cp.w_lower * (1 - 1e-9));
    CHECK(sup_field(v) <= cp.w_upper * (1 + 1e-9));
    REQUIRE(cp.gas_distances.size() == 2);
    for (double d : cp.gas_distances) CHECK(d <= 1e-6);

    LeslieGowerParams q = p;
    q.k2 = 2.0;
    CHECK_THROWS_AS(coexistence_pair(q), PreconditionError);

    // For a varying prey limit the pair leaves a residual.
    LeslieGowerParams g = scenarios::a1(f.rp, f.ab);
    g.k2 = g.k1;
    const CoexistencePair gp = coexistence_pair(g);
    CHECK_FALSE(gp.residual_ok);
    CHECK(gp.residual > 1e-8);
}

TEST_CASE("crowded logistic with constant growth") {
    const ScalarField r2 = ScalarField::constant(kGrid, 1.3);
    Rng rng(8);
    const ScalarField q = random_positive_field(kGrid, rng, 0.5, 2.0);
    const auto s = solve_logistic(0.4, r2, q);
    CHECK(logistic_residual(0.4, r2, q, s.split) <= 1e-9);
    const auto c = solve_logistic(0.4, r2, ScalarField::constant(kGrid, 0.5));
    CHECK(distance_inf(c.theta, ScalarField::constant(kGrid, 2.6)) <= 1e-10);
}

TEST_CASE("explore logs runs") {
    const auto& f = fx();
    const LeslieGowerParams p = scenarios::a1(f.rp, f.ab);
    const auto runs = explore(p, 3, 50.0, 9);
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].distance_to_first == 0.0);
    for (const auto& r : runs) {
        CHECK(r.u_min > 0.0);
        CHECK(r.v_min > 0.0);
    }
}
