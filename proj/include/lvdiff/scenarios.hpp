#pragma once

#include "lvdiff/competition.hpp"
#include "lvdiff/leslie_gower.hpp"

namespace lvdiff {

/// r1 = 1 + cos(2 pi x)/2, r2 = 1 + cos(pi x)/2 on the first axis.
struct RatePair {
    ScalarField r1;
    ScalarField r2;
};

RatePair standard_pair(const Grid& g);

/// Parameter sets realizing the predator-prey hypotheses for a given pair.
/// Each returns params whose classification the caller is expected to confirm
/// with check_conditions.
namespace scenarios {

/// ratio = 1.2 beta, k1 = k2.
LeslieGowerParams c1(const RatePair& rp, const AlphaBeta& ab);
/// ratio halfway between alpha and beta, k1 = k2, d1 = 2 (inside D+ for the standard pair).
LeslieGowerParams c2(const RatePair& rp, const AlphaBeta& ab);
/// Degenerate set: r1 = s theta_{d2o, r2} with d2o the minimizer of alpha, ratio = alpha, d2 = d2o.
/// b1 = 5 keeps the algebraic decay on this set below 1e-4 by t = 5000.
LeslieGowerParams c3(const ScalarField& r2, double s = 0.8);
/// ratio = alpha / 2 with k2 = 2 k1.
LeslieGowerParams a1(const RatePair& rp, const AlphaBeta& ab);
/// k1 = k2 and r1 = c + (a1/a2) theta_{d2,r2}, so that the prey limit problem has the
/// constant solution c and (U*, v*) is an exact steady state.
LeslieGowerParams a2_flat_prey(const ScalarField& r2, double c = 1.0);

}  // namespace scenarios

}  // namespace lvdiff
