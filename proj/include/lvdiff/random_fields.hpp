#pragma once

#include <cstdint>
#include <random>

#include "lvdiff/grid.hpp"
#include "lvdiff/spectral.hpp"

namespace lvdiff {

using Rng = std::mt19937_64;

/// Sum of `modes` Neumann cosine modes with random amplitudes, scaled to
/// max-norm 1. Its trapezoidal integral vanishes up to rounding.
ScalarField random_cosine_field(const Grid& g, Rng& rng, int modes = 4);

/// Sign-changing weight with the requested integral sign (cosine field plus offset).
ScalarField random_weight(const Grid& g, Rng& rng, IntegralSign sign);

/// Smooth field with values in [lo, hi].
ScalarField random_positive_field(const Grid& g, Rng& rng, double lo, double hi);

/// Positive, non-constant growth-rate pair.
std::pair<ScalarField, ScalarField> random_h1_pair(const Grid& g, Rng& rng);

}  // namespace lvdiff
