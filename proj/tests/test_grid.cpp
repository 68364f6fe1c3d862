#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lvdiff/errors.hpp"
#include "lvdiff/field_io.hpp"
#include "lvdiff/grid.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/stepping.hpp"

using namespace lvdiff;
using std::numbers::pi;

namespace {

ScalarField fx(const Grid& g, double (*f)(double)) {
    return ScalarField::sample(g, [f](double x, double) { return f(x); });
}

double laplacian_error(int n) {
    const Grid g = Grid::line(1.0, n);
    const ScalarField f = fx(g, [](double x) { return std::cos(pi * x); });
    const ScalarField exact = fx(g, [](double x) { return -pi * pi * std::cos(pi * x); });
    return distance_inf(neumann_laplacian_apply(f), exact);
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g = Grid::line(2.0, 5);
    CHECK(g.spacing(0) == doctest::Approx(0.5));
    CHECK(g.size() == 5);
    CHECK(g.coordinate(4)[0] == 2.0);
    const Grid b = Grid::box(1.0, 3.0, 5, 7);
    CHECK(b.size() == 35);
    CHECK(b.spacing(1) == doctest::Approx(0.5));
    CHECK(b.coordinate(b.node(2, 3))[1] == doctest::Approx(1.5));
    CHECK_THROWS_AS(Grid::line(1.0, 2), PreconditionError);
    CHECK_THROWS_AS(Grid::line(-1.0, 9), PreconditionError);
    CHECK_THROWS_AS(Grid::box(1.0, 1.0, 9, 2), PreconditionError);
}

TEST_CASE("fields reject bad input") {
    const Grid g = Grid::line(1.0, 4);
    CHECK_THROWS_AS(ScalarField(g, {1.0, 2.0}), PreconditionError);
    CHECK_THROWS_AS(ScalarField(g, {1.0, NAN, 0.0, 0.0}), PreconditionError);
    const ScalarField a = ScalarField::constant(g, 1.0);
    const ScalarField b = ScalarField::constant(Grid::line(1.0, 5), 1.0);
    CHECK_THROWS_AS(a + b, PreconditionError);
    CHECK_THROWS_AS(integrate(a, quadrature_weights(b.grid())), PreconditionError);
}

TEST_CASE("quadrature") {
    const Grid g = Grid::line(1.0, 257);
    CHECK(integrate(ScalarField::constant(g, 2.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(integrate(fx(g, [](double x) { return std::cos(2 * pi * x); }))) <= 1e-12);
    CHECK(integrate(fx(g, [](double x) { return x; })) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(average(fx(g, [](double x) { return 1 + std::cos(2 * pi * x); })) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(average(ScalarField::constant(g, 3.5)) == doctest::Approx(3.5));

    for (const Grid& gg : {Grid::line(3.0, 17), Grid::box(2.0, 0.5, 9, 33)}) {
        double s = 0.0;
        for (double w : quadrature_weights(gg).weights) s += w;
        CHECK(std::abs(s - gg.measure()) <= 1e-12 * gg.measure());
    }
    // Affine in each axis is integrated exactly: x*y on [0,2]x[0,1] -> 1.
    const Grid b = Grid::box(2.0, 1.0, 5, 4);
    CHECK(integrate(ScalarField::sample(b, [](double x, double y) { return x * y; })) == doctest::Approx(1.0));
}

TEST_CASE("extrema") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField c = fx(g, [](double x) { return std::cos(2 * pi * x); });
    CHECK(sup_field(c) == doctest::Approx(1.0));
    CHECK(inf_field(c) == doctest::Approx(-1.0));
    const ScalarField x = fx(g, [](double t) { return t; });
    CHECK(sup_field(x) == 1.0);
    CHECK(inf_field(x) == 0.0);
    CHECK(sup_field(ScalarField::constant(g, 3.0)) == 3.0);
}

TEST_CASE("Neumann Laplacian") {
    const Grid g = Grid::line(1.0, 201);
    CHECK(norm_inf(neumann_laplacian_apply(ScalarField::constant(g, 4.2))) == 0.0);

    // Second order: halving the spacing divides the error by about four.
    const double e1 = laplacian_error(201), e2 = laplacian_error(401);
    CHECK(e1 <= 1e-3);
    CHECK(e1 / e2 >= 3.5);

    for (const Grid& gg : {Grid::line(1.0, 33), Grid::box(1.0, 2.0, 9, 13)}) {
        const auto L = laplacian_matrix(gg);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(L.rows());
        CHECK((L * ones).cwiseAbs().maxCoeff() <= 1e-9);

        Rng rng(3);
        const ScalarField u = random_positive_field(gg, rng, -1.0, 2.0);
        const ScalarField v = random_positive_field(gg, rng, 0.0, 1.0);
        const double a = inner_product(neumann_laplacian_apply(u), v);
        const double b = inner_product(u, neumann_laplacian_apply(v));
        CHECK(std::abs(a - b) <= 1e-12 * integrate(neumann_laplacian_apply(u).map([](double t) { return std::abs(t); })) * norm_inf(v));
        const ScalarField lu = neumann_laplacian_apply(u);
        CHECK(std::abs(integrate(lu)) <= 1e-10 * integrate(lu.map([](double t) { return std::abs(t); })));
        // Dirichlet energy equals -<Lap u, u>.
        CHECK(dirichlet_energy(u) == doctest::Approx(-inner_product(lu, u)).epsilon(1e-10));
    }
}

TEST_CASE("assembled Laplacian matches the stencil") {
    const Grid g = Grid::box(1.0, 1.0, 7, 5);
    Rng rng(9);
    const ScalarField u = random_positive_field(g, rng, 0.0, 1.0);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(u.values().data(), u.size());
    const Eigen::VectorXd y = laplacian_matrix(g) * x;
    const ScalarField s = neumann_laplacian_apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(y[i] == doctest::Approx(s[i]).epsilon(1e-12));
}

TEST_CASE("field csv round trip") {
    for (const Grid& g : {Grid::line(1.5, 9), Grid::box(1.0, 2.0, 4, 5)}) {
        Rng rng(1);
        const ScalarField f = random_positive_field(g, rng, -1.0, 1.0);
        std::stringstream ss;
        write_field_csv(ss, f);
        const ScalarField back = read_field_csv(ss);
        CHECK(back.grid() == g);
        CHECK(distance_inf(back, f) == 0.0);
    }
    std::stringstream bad("x,value\n0,1\n0.3,2\n1,3\n");
    CHECK_THROWS_AS(read_field_csv(bad), ConfigError);
    CHECK_THROWS_AS(read_field_csv(std::string("/nonexistent/field.csv")), ConfigError);
}

TEST_CASE("step schedule") {
    const StepSchedule s;
    CHECK(s.dt(0) == doctest::Approx(1e-3));
    CHECK(s.dt(10000) == doctest::Approx(0.05));
    double last = 0.0;
    int calls = 0;
    const long n = for_each_step(s, 3.0, [&](double t, double dt) {
        CHECK(dt > 0.0);
        last = t + dt;
        ++calls;
        return true;
    });
    CHECK(n == calls);
    CHECK(last == doctest::Approx(3.0).epsilon(1e-14));
    int early = 0;
    for_each_step(s, 3.0, [&](double, double) { return ++early < 5; });
    CHECK(early == 5);
}

TEST_CASE("diffusion stepper conserves mass and positivity") {
    for (const Grid& g : {Grid::line(1.0, 65), Grid::box(1.0, 1.0, 17, 9)}) {
        Rng rng(4);
        const ScalarField u0 = random_positive_field(g, rng, 0.0, 1.0);
        std::vector<double> u(u0.values()), out(u.size()), zero(u.size(), 0.0);
        DiffusionStepper st(g, 0.3);
        for (int k = 0; k < 50; ++k) {
            st.step(u, zero, zero, 0.05, out);
            u.swap(out);
        }
        const ScalarField uf(g, u);
        CHECK(integrate(uf) == doctest::Approx(integrate(u0)).epsilon(1e-12));
        CHECK(inf_field(uf) >= 0.0);
        CHECK(sup_field(uf) - inf_field(uf) < sup_field(u0) - inf_field(u0));
    }
}
