#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lvdiff/competition.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/phase_diagram.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/scenarios.hpp"
#include "lvdiff/spectral.hpp"

using namespace lvdiff;
using std::numbers::pi;

namespace {

const Grid kGrid = Grid::line(1.0, 257);

CompetitionParams make(double d1, double d2, double ratio, const RatePair& rp, double b1 = 1.0) {
    return CompetitionParams{d1, d2, b1, ratio, 1.0, rp.r1, rp.r2};
}

}  // namespace

TEST_CASE("alpha and beta") {
    const RatePair rp = standard_pair(kGrid);
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    CHECK(ab.alpha < ab.beta);
    CHECK(ab.d2_samples.size() == 49);

    const ScalarField flat = ScalarField::constant(kGrid, 1.5);
    const AlphaBeta c = alpha_beta(rp.r1, flat);
    CHECK(std::abs(c.alpha - average(rp.r1) / 1.5) <= 1e-10);
    CHECK(std::abs(c.beta - sup_field(rp.r1) / 1.5) <= 1e-10);

    for (double d2 : {0.05, 2.0}) {
        const double s = 0.9;
        const ScalarField r1 = s * solve_theta(d2, rp.r2).theta;
        const AlphaBeta b = alpha_beta(r1, rp.r2);
        CHECK(b.alpha <= s * (1 + 1e-12));
        CHECK(b.beta >= s * (1 - 1e-12));
    }
    CHECK_THROWS_AS(alpha_beta(ScalarField::constant(kGrid, 1.0), ScalarField::constant(kGrid, 2.0)), ConfigError);
}

TEST_CASE("alpha and beta are stable under refinement") {
    const Grid coarse = Grid::line(1.0, 129);
    const RatePair a = standard_pair(coarse), b = standard_pair(kGrid);
    const AlphaBeta x = alpha_beta(a.r1, a.r2), y = alpha_beta(b.r1, b.r2);
    CHECK(std::abs(x.alpha - y.alpha) <= 0.01 * y.alpha);
    CHECK(std::abs(x.beta - y.beta) <= 0.01 * y.beta);
}

TEST_CASE("region classification") {
    const RatePair rp = standard_pair(kGrid);
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    for (double d1 : {0.01, 1.0, 50.0})
        for (double d2 : {0.01, 1.0, 50.0}) {
            CHECK(classify_point(make(d1, d2, 0.8 * ab.alpha, rp)).region == Region::D_minus);
            CHECK(classify_point(make(d1, d2, 1.1 * ab.beta, rp)).region == Region::D_plus);
        }
}

TEST_CASE("index sets and the boundary curve") {
    const RatePair rp = standard_pair(kGrid);
    const ScalarField th = solve_theta(1.0, rp.r2).theta;
    // Large ratio: w <= 0 everywhere.
    const IndexSets s1 = index_sets(rp.r1, th, 10.0);
    CHECK(s1.in_I1);
    CHECK(phi_tilde(rp.r1, th, 10.0).value == 0.0);
    // Small ratio: positive integral.
    CHECK_FALSE(index_sets(rp.r1, th, 0.1).in_I);
    CHECK_THROWS_AS(phi_tilde(rp.r1, th, 0.1), PreconditionError);
    // Mid ratio: negative integral with a positive part.
    const double ratio = 1.3;
    const IndexSets s2 = index_sets(rp.r1, th, ratio);
    REQUIRE(s2.in_I2);
    const PhiTilde phi = phi_tilde(rp.r1, th, ratio);
    CHECK(phi.value > 0.0);
    CHECK(std::abs(phi.value - phi.bisection) <= 1e-6 * phi.value);
    const ScalarField w = rp.r1 - ratio * th;
    CHECK(mu1(phi.value * (1 + 1e-3), w).eigenvalue > 0.0);
    CHECK(mu1(phi.value * (1 - 1e-3), w).eigenvalue < 0.0);
    CHECK(std::abs(classify_weight_at(phi.value, rp.r1, th, ratio).mu1_value) <= 1e-6);
    CHECK(classify_weight_at(phi.value, rp.r1, th, ratio).region == Region::D_zero);
}

TEST_CASE("proportional growth rates") {
    const ScalarField r2 = ScalarField::sample(kGrid, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); });
    const ScalarField flat = ScalarField::constant(kGrid, 1.0);
    CHECK_FALSE(e_s_dichotomy(1.0, flat, r2).d2_star);
    CHECK(e_s_dichotomy(1.0, flat, r2).which == EsCase::E1_r1_constant);
    CHECK_FALSE(e_s_dichotomy(1.0, r2, flat).d2_star);
    CHECK(e_s_dichotomy(1.0, r2, flat).which == EsCase::E2_r2_constant);
    for (double d2o : {0.05, 0.5, 5.0}) {
        const double s = 1.3;
        const auto e = e_s_dichotomy(s, s * solve_theta(d2o, r2).theta, r2);
        REQUIRE(e.d2_star);
        CHECK(std::abs(*e.d2_star - d2o) <= 1e-4 * d2o);
    }
    const ScalarField other = ScalarField::sample(kGrid, [](double x, double) { return 1.0 + 0.3 * std::sin(2 * pi * x); });
    CHECK_FALSE(e_s_dichotomy(1.0, other, r2).d2_star);
    const ScalarField zeroed = ScalarField::sample(kGrid, [](double x, double) { return x; });
    CHECK_THROWS_AS(e_s_dichotomy(1.0, zeroed, r2), PreconditionError);
}

TEST_CASE("steady states and stability") {
    const RatePair rp = standard_pair(kGrid);
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);

    const CompetitionParams plus = make(1.0, 1.0, 1.2 * ab.beta, rp);
    const auto cat = steady_state_catalog(plus);
    CHECK_FALSE(cat.coexistence);
    CHECK(cat.trivial.stability.tag == Stability::unstable);
    CHECK(cat.trivial.stability.eigenvalue ==
          doctest::Approx(std::min(mu1(1.0, rp.r1).eigenvalue, mu1(1.0, rp.r2).eigenvalue)));
    CHECK(cat.semi_trivial_u.stability.tag == Stability::unstable);
    CHECK(cat.semi_trivial_u.stability.v_block == doctest::Approx(mu1(1.0, rp.r2).eigenvalue));
    CHECK(cat.semi_trivial_v.stability.tag == Stability::stable);
    for (const SteadyState* s : cat.states()) CHECK(s->residual <= 1e-8);

    for (double d1 : {0.01, 1.0, 30.0}) {
        const CompetitionParams minus = make(d1, 0.3, 0.5 * ab.alpha, rp, 2.0);
        const auto co = coexistence_state(minus);
        REQUIRE(co);
        CHECK(co->residual <= 1e-8);
        CHECK(competition_residual(minus, co->u, co->v) <= 1e-8);
        // b1 U solves the reduced logistic problem.
        const ScalarField rt = rp.r1 - 0.5 * ab.alpha * solve_theta(0.3, rp.r2).theta;
        const SplitField bu{co->u.offset * 2.0, 2.0 * co->u.deviation};
        CHECK(logistic_residual(d1, rt, bu) <= 1e-8);
        CHECK(co->stability.tag == Stability::stable);
    }
}

TEST_CASE("simulation") {
    const RatePair rp = standard_pair(kGrid);
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const ScalarField z = ScalarField::constant(kGrid, 0.0);

    const CompetitionParams p = make(0.3, 1.0, 0.5 * ab.alpha, rp);
    const auto cat = steady_state_catalog(p);
    SimulationOptions so;
    so.max_horizon = 10.0;
    const auto still = simulate_competition(p, z, z, 10.0, cat, so);
    CHECK(norm_inf(still.U) == 0.0);
    CHECK(norm_inf(still.V) == 0.0);

    Rng rng(6);
    const auto co = simulate_competition(p, random_positive_field(kGrid, rng, 0.1, 1.0),
                                         random_positive_field(kGrid, rng, 0.1, 1.0), 2000.0, cat);
    CHECK(co.attractor == "coexistence");
    CHECK(co.attractor_distance <= 1e-5);

    const CompetitionParams q = make(0.3, 1.0, 1.2 * ab.beta, rp);
    const auto sv = simulate_competition(q, random_positive_field(kGrid, rng, 0.1, 1.0),
                                         random_positive_field(kGrid, rng, 0.1, 1.0), 2000.0,
                                         steady_state_catalog(q));
    CHECK(sv.attractor == "semi_trivial_v");
    CHECK(sv.attractor_distance <= 1e-5);
}

TEST_CASE("the second species ignores the first") {
    const RatePair rp = standard_pair(kGrid);
    const CompetitionParams p{0.2, 0.7, 1.0, 0.9, 1.7, rp.r1, rp.r2};
    Rng rng(10);
    const ScalarField v0 = random_positive_field(kGrid, rng, 0.0, 1.0);
    SimulationOptions so;
    so.max_horizon = 30.0;
    const auto tr = simulate_competition(p, ScalarField::constant(kGrid, 0.4), v0, 30.0, steady_state_catalog(p), so);
    const auto lt = march_logistic(p.d2, p.r2, p.c2 * v0, 30.0);
    for (std::size_t i = 0; i < kGrid.size(); ++i) CHECK(lt.final_state[i] / p.c2 == tr.V[i]);
}

TEST_CASE("phase diagram single-region maps and boundary") {
    const RatePair rp = standard_pair(Grid::line(1.0, 129));
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    PhaseDiagramOptions o;
    o.d1_values = {1e-3, 1e-2, 0.1, 1.0, 10.0};
    o.d2_values = {1e-2, 0.1, 1.0, 10.0};
    o.threads = 2;
    auto count = [&](double ratio, Region r) {
        const PhaseDiagram pd = phase_diagram(CompetitionParams{1, 1, 1, ratio, 1, rp.r1, rp.r2}, o);
        int n = 0;
        for (const auto& c : pd.cells) n += c.region == r;
        return n;
    };
    CHECK(count(1.1 * ab.beta, Region::D_plus) == 20);
    CHECK(count(0.9 * ab.alpha, Region::D_minus) == 20);

    o.d1_values.clear();
    for (int k = 0; k <= 30; ++k) o.d1_values.push_back(std::pow(10.0, -4.0 + 0.15 * k));
    const PhaseDiagram pd = phase_diagram(CompetitionParams{1, 1, 1, 1.3, 1, rp.r1, rp.r2}, o);
    const BoundaryCheck b = boundary_check(pd);
    CHECK(b.columns == 4);
    CHECK(b.ok);
}
