#include "lvdiff/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace lvdiff {

RatePair standard_pair(const Grid& g) {
    using std::numbers::pi;
    return {ScalarField::sample(g, [](double x, double) { return 1.0 + 0.5 * std::cos(2.0 * pi * x); }),
            ScalarField::sample(g, [](double x, double) { return 1.0 + 0.5 * std::cos(pi * x); })};
}

namespace scenarios {

LeslieGowerParams c1(const RatePair& rp, const AlphaBeta& ab) {
    return LeslieGowerParams{0.5, 1.0, 1.0, 1.2 * ab.beta, 1.0, 1.0, 1.0, rp.r1, rp.r2};
}

LeslieGowerParams c2(const RatePair& rp, const AlphaBeta& ab) {
    return LeslieGowerParams{2.0, 1.0, 1.0, 0.5 * (ab.alpha + ab.beta), 1.0, 1.0, 1.0, rp.r1, rp.r2};
}

LeslieGowerParams c3(const ScalarField& r2, double s) {
    // The minimizer of alpha does not depend on r1, so any admissible r1 locates it.
    const ScalarField probe = ScalarField::constant(r2.grid(), 1.0);
    const double d2o = alpha_beta(probe, r2).alpha_argmin;
    const ScalarField r1 = s * solve_theta(d2o, r2).theta;
    const AlphaBeta ab = alpha_beta(r1, r2);
    return LeslieGowerParams{0.5, d2o, 5.0, ab.alpha, 1.0, 1.0, 1.0, r1, r2};
}

LeslieGowerParams a1(const RatePair& rp, const AlphaBeta& ab) {
    // ratio = a1 k2 / (a2 k1) = a1 * 2
    return LeslieGowerParams{0.5, 1.0, 1.0, 0.25 * ab.alpha, 1.0, 1.0, 2.0, rp.r1, rp.r2};
}

LeslieGowerParams a2_flat_prey(const ScalarField& r2, double c) {
    const double a1 = 0.5, a2 = 1.0, d2 = 1.0;
    const ScalarField r1 = solve_theta(d2, r2).theta.map([&](double t) { return c + (a1 / a2) * t; });
    return LeslieGowerParams{0.5, d2, 1.0, a1, a2, 1.0, 1.0, r1, r2};
}

}  // namespace scenarios

}  // namespace lvdiff
