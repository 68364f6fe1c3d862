#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lvdiff/errors.hpp"
#include "lvdiff/logistic.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/spectral.hpp"

using namespace lvdiff;
using std::numbers::pi;

namespace {

ScalarField fx(const Grid& g, double (*f)(double)) {
    return ScalarField::sample(g, [f](double x, double) { return f(x); });
}

ScalarField standard_h(const Grid& g) {
    return fx(g, [](double x) { return 1.0 + 0.5 * std::cos(2 * pi * x); });
}

double lam(const ScalarField& h) { return std::get<SpectralResult>(lambda1(h)).eigenvalue; }

}  // namespace

TEST_CASE("existence classification") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField pos = fx(g, [](double x) { return std::cos(2 * pi * x) + 0.2; });
    for (double d : {0.01, 1.0, 100.0}) CHECK(classify_existence(d, pos).existence == Existence::unique_positive);

    const ScalarField neg = fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; });
    const double l = lam(neg);
    CHECK(classify_existence(2.0 / l, neg).existence == Existence::extinction);
    CHECK(classify_existence(0.5 / l, neg).existence == Existence::unique_positive);
    CHECK(classify_existence(1.0 / l, neg).degenerate);

    const ScalarField nonpos = fx(g, [](double x) { return -1.0 - x; });
    for (double d : {0.01, 1.0, 100.0}) CHECK(classify_existence(d, nonpos).existence == Existence::extinction);

    CHECK_THROWS_AS(classify_existence(1.0, ScalarField::constant(g, 1.0)), PreconditionError);
    CHECK_THROWS_AS(solve_theta(2.0 / l, neg), PreconditionError);
}

TEST_CASE("constant calibration input") {
    for (const Grid& g : {Grid::line(1.0, 33), Grid::box(1.0, 1.0, 9, 9)}) {
        const auto th = solve_theta(0.7, ScalarField::constant(g, 1.7));
        CHECK(distance_inf(th.theta, ScalarField::constant(g, 1.7)) <= 1e-12);
        CHECK(th.outside_h2);
    }
}

TEST_CASE("manufactured steady state") {
    // theta* = 1 + 0.3 cos(pi x) solves the discrete problem for h = theta* - d Lap(theta*)/theta*.
    const Grid g = Grid::line(1.0, 257);
    const ScalarField ts = fx(g, [](double x) { return 1.0 + 0.3 * std::cos(pi * x); });
    for (double d : {0.01, 1.0, 10.0}) {
        const ScalarField lap = neumann_laplacian_apply(ts);
        std::vector<double> h(g.size());
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = ts[i] - d * lap[i] / ts[i];
        const auto th = solve_theta(d, ScalarField(g, h));
        CHECK(distance_inf(th.theta, ts) <= 1e-9);
    }
}

TEST_CASE("steady state properties") {
    const Grid g = Grid::line(1.0, 257);
    for (const ScalarField& h : {standard_h(g), fx(g, [](double x) { return std::cos(2 * pi * x) + 0.2; })}) {
        for (double d : {1e-4, 0.01, 1.0, 100.0, 1e4}) {
            const auto th = solve_theta(d, h);
            CHECK(th.solver_residual <= 1e-10);
            CHECK(logistic_residual(d, h, th.split) <= 1e-10);
            CHECK(inf_field(th.theta) > 0.0);
            CHECK(integrate(h) < integrate(th.theta));
            if (d <= 100.0) {
                CHECK(std::abs(mu1(d, h - th.theta).eigenvalue) <= 1e-6);
                CHECK(mu1(d, h - 2.0 * th.theta).eigenvalue > 0.0);
            }
        }
    }
}

TEST_CASE("time-march oracle") {
    const Grid g = Grid::line(1.0, 257);
    LogisticOptions o;
    o.cross_validate = true;
    const auto th = solve_theta(1.0, standard_h(g), o);
    REQUIRE(th.cross_check_distance.has_value());
    CHECK(*th.cross_check_distance <= 1e-6);
}

TEST_CASE("generalized crowding") {
    const Grid g = Grid::line(1.0, 129);
    Rng rng(2);
    const ScalarField q = random_positive_field(g, rng, 0.5, 2.0);
    const auto th = solve_logistic(0.3, 2.0 * q, q);
    CHECK(distance_inf(th.theta, ScalarField::constant(g, 2.0)) <= 1e-10);
    const auto t2 = solve_logistic(0.3, standard_h(g), q);
    CHECK(logistic_residual(0.3, standard_h(g), q, t2.split) <= 1e-10);
}

TEST_CASE("limits in d") {
    const Grid g = Grid::line(1.0, 257);
    const ThetaLimitsReport r = theta_limits_check(standard_h(g));
    CHECK(r.large_d_distance <= 1e-3);
    CHECK(r.small_d_distance <= 0.02);
    const ThetaLimitsReport one = theta_limits_check(ScalarField::constant(g, 1.0));
    CHECK(one.large_d_distance <= 1e-12);
    CHECK(one.small_d_distance <= 1e-12);
}

TEST_CASE("march") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField h = standard_h(g);
    const auto zero = march_logistic(1.0, h, ScalarField::constant(g, 0.0), 10.0);
    CHECK(norm_inf(zero.final_state) == 0.0);

    const auto th = solve_theta(1.0, h);
    Rng rng(31);
    for (int k = 0; k < 3; ++k) {
        MarchOptions mo;
        mo.target = th.theta;
        const auto tr = march_logistic(1.0, h, random_positive_field(g, rng, 0.01, 3.0), 500.0, mo);
        CHECK(tr.rows.back().distance_to_target <= 1e-6);
        for (const auto& row : tr.rows) CHECK(row.min_u >= 0.0);
    }

    const ScalarField neg = fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; });
    const auto ext = march_logistic(2.0 / lam(neg), neg, ScalarField::constant(g, 1.0), 1000.0);
    CHECK(norm_inf(ext.final_state) <= 1e-6);
    CHECK_THROWS_AS(march_logistic(1.0, h, ScalarField::constant(g, -1.0), 1.0), PreconditionError);
}
