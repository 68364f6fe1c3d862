#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "lvdiff/errors.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/spectral.hpp"

using namespace lvdiff;
using std::numbers::pi;

namespace {

ScalarField fx(const Grid& g, double (*f)(double)) {
    return ScalarField::sample(g, [f](double x, double) { return f(x); });
}

// Independent oracle: assemble -d Lap - h column by column from the stencil and
// take the smallest real eigenvalue of the non-symmetric matrix.
double stencil_mu1(double d, const ScalarField& h) {
    const Grid& g = h.grid();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd A(n, n);
    std::vector<double> e(g.size(), 0.0), col(g.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        neumann_laplacian_apply(g, e, col);
        e[j] = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) A(i, j) = -d * col[i] - (i == j ? h[i] : 0.0);
    }
    return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().real().minCoeff();
}

double lam(const Lambda1Result& r) { return std::get<SpectralResult>(r).eigenvalue; }

}  // namespace

TEST_CASE("weight classification") {
    const Grid g = Grid::line(1.0, 257);
    const WeightClass c = classify_weight(fx(g, [](double x) { return std::cos(2 * pi * x); }));
    CHECK(c.integral_sign == IntegralSign::zero);
    CHECK(c.changes_sign);
    const WeightClass one = classify_weight(ScalarField::constant(g, 1.0));
    CHECK(one.integral_sign == IntegralSign::positive);
    CHECK_FALSE(one.changes_sign);
    const WeightClass neg = classify_weight(fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; }));
    CHECK(neg.integral_sign == IntegralSign::negative);
    CHECK(neg.changes_sign);
    CHECK(neg.integral == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(classify_weight(ScalarField::constant(g, 0.0)).identically_zero);
}

TEST_CASE("mu1 trivial cases") {
    const Grid g = Grid::line(1.0, 129);
    for (double d : {0.01, 1.0, 100.0}) {
        const SpectralResult z = mu1(d, ScalarField::constant(g, 0.0));
        CHECK(std::abs(z.eigenvalue) <= 1e-12);
        CHECK(is_constant(z.eigenfunction, 1e-8));
        CHECK(mu1(d, ScalarField::constant(g, 2.5)).eigenvalue == doctest::Approx(-2.5).epsilon(1e-12));
    }
}

TEST_CASE("mu1 signs") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField c = fx(g, [](double x) { return std::cos(2 * pi * x); });
    for (double d : {0.01, 0.1, 1.0, 10.0}) CHECK(mu1(d, c).eigenvalue < 0.0);
    CHECK(mu1(1.0, fx(g, [](double x) { return -x; })).eigenvalue > 0.0);
}

TEST_CASE("mu1 agrees with a stencil-assembled dense oracle") {
    const Grid g = Grid::line(1.0, 65);
    Rng rng(12);
    for (int k = 0; k < 5; ++k) {
        const ScalarField h = random_positive_field(g, rng, -1.0, 1.5);
        const double d = std::pow(10.0, -2.0 + k);
        const SpectralResult r = mu1(d, h);
        const double oracle = stencil_mu1(d, h);
        CHECK(std::abs(r.eigenvalue - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("iterative and dense mu1 agree, eigenfunction is positive and normalized") {
    Rng rng(5);
    for (int n : {65, 129, 257}) {
        const Grid g = Grid::line(1.0, n);
        for (int k = 0; k < 3; ++k) {
            const ScalarField h = random_weight(g, rng, IntegralSign::negative);
            const double d = std::pow(10.0, -2.0 + 1.5 * k);
            const SpectralResult it = mu1(d, h);
            const SpectralResult de = mu1_dense(d, h);
            CHECK(std::abs(it.eigenvalue - de.eigenvalue) <= 1e-8 * std::max(1.0, std::abs(de.eigenvalue)));
            CHECK(inf_field(it.eigenfunction) > 0.0);
            CHECK(inner_product(it.eigenfunction, it.eigenfunction) == doctest::Approx(1.0).epsilon(1e-10));
            const double scale = 4.0 * d / (g.spacing(0) * g.spacing(0)) + norm_inf(h);
            CHECK(mu1_residual(d, h, it.eigenvalue, it.eigenfunction) <= 1e-11 * scale);
        }
    }
}

TEST_CASE("mu1 in two dimensions") {
    const Grid g = Grid::box(1.0, 1.0, 17, 13);
    const ScalarField h = ScalarField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y) - 0.2; });
    CHECK(mu1(0.05, h).eigenvalue == doctest::Approx(stencil_mu1(0.05, h)).epsilon(1e-9));
}

TEST_CASE("lambda1 trichotomy") {
    const Grid g = Grid::line(1.0, 129);
    CHECK(std::holds_alternative<NoNonzeroPrincipal>(lambda1(fx(g, [](double x) { return std::cos(2 * pi * x); }))));

    const ScalarField neg = fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; });
    const double l = lam(lambda1(neg));
    CHECK(l > 0.0);
    CHECK(std::abs(l - lam(lambda1_dense(neg))) <= 1e-8 * l);
    const auto& s = std::get<SpectralResult>(lambda1(neg));
    CHECK(inf_field(s.eigenfunction) > 0.0);

    const ScalarField pos = fx(g, [](double x) { return 0.5 - std::cos(2 * pi * x); });
    CHECK(lam(lambda1(pos)) < 0.0);
    CHECK(lam(lambda1(pos)) == doctest::Approx(lam(lambda1_dense(pos))).epsilon(1e-8));

    CHECK_THROWS_AS(lambda1(ScalarField::constant(g, 1.0)), PreconditionError);
    CHECK_THROWS_AS(lambda1(fx(g, [](double x) { return -x; })), PreconditionError);
}

TEST_CASE("lambda1 by bisection") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField h = fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; });
    const double l = lam(lambda1(h));
    const double b = lambda1_by_bisection(h);
    CHECK(std::abs(l - b) <= 1e-6 * l);
    CHECK(std::abs(mu1(1.0 / b, h).eigenvalue) <= 1e-6);
    CHECK(mu1(0.5 / l, h).eigenvalue < 0.0);
    CHECK(mu1(2.0 / l, h).eigenvalue > 0.0);
    CHECK_THROWS_AS(lambda1_by_bisection(fx(g, [](double x) { return 0.5 - std::cos(2 * pi * x); })),
                    PreconditionError);
}

TEST_CASE("mu1 limits in d") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField h = fx(g, [](double x) { return std::cos(2 * pi * x); });
    const Mu1LimitsReport r = mu1_limits_check(h);
    CHECK(r.increasing);
    CHECK(r.concave);
    CHECK(r.d.size() == 25);
    CHECK(r.small_d_limit == doctest::Approx(-1.0));
    CHECK(std::abs(r.small_d_value - r.small_d_limit) <= 0.05);
    CHECK(std::abs(r.large_d_value - r.large_d_limit) <= 1e-3);
}

TEST_CASE("comparison properties") {
    const Grid g = Grid::line(1.0, 129);
    Rng rng(77);
    for (int k = 0; k < 20; ++k) {
        const ScalarField h = random_cosine_field(g, rng);
        const ScalarField kk = h + random_positive_field(g, rng, 0.0, 0.3);
        const double d = std::pow(10.0, std::uniform_real_distribution<double>(-2, 1)(rng));
        CHECK(mu1(d, h).eigenvalue > mu1(d, kk).eigenvalue);
    }
    for (int k = 0; k < 5; ++k) {
        const ScalarField h = random_weight(g, rng, IntegralSign::negative);
        const ScalarField bump = random_positive_field(g, rng, 0.0, 1.0);
        const ScalarField kk = h + (0.5 * std::abs(average(h)) / average(bump)) * bump;
        CHECK(lam(lambda1(h)) > lam(lambda1(kk)));
    }
}

TEST_CASE("lambda1 continuity") {
    const Grid g = Grid::line(1.0, 257);
    const ScalarField h = fx(g, [](double x) { return std::cos(2 * pi * x) - 0.5; });
    Rng rng(8);
    const ScalarField delta = 1e-4 * random_cosine_field(g, rng);
    CHECK(std::abs(lam(lambda1(h + delta)) - lam(lambda1(h))) <= 1e-2);
}
