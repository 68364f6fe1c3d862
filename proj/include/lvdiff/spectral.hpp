#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lvdiff/grid.hpp"

namespace lvdiff {

enum class IntegralSign { negative, zero, positive };

const char* to_string(IntegralSign s);

struct WeightClass {
    IntegralSign integral_sign = IntegralSign::zero;
    bool changes_sign = false;
    bool identically_zero = false;
    double integral = 0.0;
};

/// Integral sign against 1e-10 |Omega| sup|h|; sign change against the pointwise
/// tolerance 1e-12 sup|h|.
WeightClass classify_weight(const ScalarField& h);

struct SpectralResult {
    double eigenvalue = 0.0;
    ScalarField eigenfunction;  // positive, integral of square equal to 1
    double residual = 0.0;
    int iterations = 0;
    std::string method;
};

struct SpectralOptions {
    /// Residual target relative to the operator scale d ||K||/w + max|h|.
    double tolerance = 1e-12;
    int max_iterations = 200;
    /// Allow the dense solve when inverse iteration fails and the grid is small.
    bool dense_fallback = true;
};

constexpr std::size_t kDenseLimit = 2048;

/// Principal eigenvalue of -d Lap - h with Neumann closure.
/// Shifted inverse iteration; the shift stays below the eigenvalue (checked by
/// the inertia of each factorization), which keeps every iterate positive.
SpectralResult mu1(double d, const ScalarField& h, const SpectralOptions& opts = {});

/// Dense symmetric eigensolve of the same operator; point count <= kDenseLimit.
SpectralResult mu1_dense(double d, const ScalarField& h);

/// Returned by lambda1 when the integral of the weight vanishes: then 0 is
/// the only principal eigenvalue.
struct NoNonzeroPrincipal {
    double integral = 0.0;
};

using Lambda1Result = std::variant<SpectralResult, NoNonzeroPrincipal>;

/// Nonzero principal eigenvalue of -Lap phi = lambda h phi. Newton iteration on
/// the concave map lambda -> mu1(1, lambda h). Throws PreconditionError when h
/// does not change sign.
Lambda1Result lambda1(const ScalarField& h, const SpectralOptions& opts = {});

/// Dense oracle: QZ on the pencil (K, diag(w h)), principal pair selected by
/// sign-definiteness of the eigenfunction, smallest |lambda| first.
Lambda1Result lambda1_dense(const ScalarField& h);

/// 1/d* where mu1(d*, h) = 0, located by bisection in log d over [1e-6, 1e6].
/// Requires a negative integral and a sign change.
double lambda1_by_bisection(const ScalarField& h, double rel_tol = 1e-13);

struct Mu1LimitsReport {
    std::vector<double> d;
    std::vector<double> mu;
    bool increasing = true;
    bool concave = true;
    double small_d_value = 0.0;
    double small_d_limit = 0.0;  // min(-h)
    double large_d_value = 0.0;
    double large_d_limit = 0.0;  // -average(h)
};

/// Samples mu1 on a log grid of d and checks monotonicity, midpoint
/// concavity and both endpoint limits. Report only.
Mu1LimitsReport mu1_limits_check(const ScalarField& h, int samples = 25, double d_min = 1e-4, double d_max = 1e4);

/// Operator residual ||(-d Lap - h - mu) phi|| in the symmetrized 2-norm.
double mu1_residual(double d, const ScalarField& h, double mu, const ScalarField& phi);

}  // namespace lvdiff
