#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lvdiff/grid.hpp"
#include "lvdiff/stepping.hpp"

namespace lvdiff {

enum class Existence { unique_positive, extinction };
const char* to_string(Existence e);

struct ExistenceVerdict {
    Existence existence = Existence::extinction;
    /// 1/lambda1(h) for a negative-integral sign-changing weight, +inf when
    /// every d admits a positive state, 0 when none does.
    double threshold_d = 0.0;
    /// d within 1e-8 relative of the threshold; the side is not asserted.
    bool degenerate = false;
    std::string reason;
};

/// Existence of a positive steady state of u_t = d Lap u + u (h - u).
/// Throws PreconditionError for constant h.
ExistenceVerdict classify_existence(double d, const ScalarField& h);

/// A field stored as offset + deviation. For nearly constant states the
/// deviation carries the spatial structure at full relative precision, which
/// keeps d Lap(theta) accurate when d is large.
struct SplitField {
    double offset = 0.0;
    ScalarField deviation;

    ScalarField combined() const { return deviation + offset; }
};

enum class SolveMethod { monotone_iteration, newton, time_march };
const char* to_string(SolveMethod m);

struct LogisticOptions {
    double residual_tol = 1e-10;
    int monotone_sweeps = 60;
    int newton_max = 60;
    int monotone_max = 200000;
    /// March from the upper solution and compare; distance goes to cross_check_distance.
    bool cross_validate = false;
    double cross_validate_T = 200.0;
    StepSchedule schedule{};
};

struct LogisticSteadyState {
    ScalarField theta;
    SplitField split;
    double d = 0.0;
    ScalarField h;
    Existence existence = Existence::unique_positive;
    double solver_residual = 0.0;
    SolveMethod method = SolveMethod::newton;
    int iterations = 0;
    /// Constant h is accepted as a calibration input but lies outside the lemma hypotheses.
    bool outside_h2 = false;
    std::optional<double> cross_check_distance;
};

/// theta_{d,h}: the positive solution of d Lap theta + theta (h - theta) = 0.
/// Monotone iteration from the upper solution sup h+ + 1, then damped Newton.
/// Throws PreconditionError when no positive state exists.
LogisticSteadyState solve_theta(double d, const ScalarField& h, const LogisticOptions& opts = {});

/// Generalized crowding: d Lap theta + theta (h - q theta) = 0 with q > 0.
LogisticSteadyState solve_logistic(double d, const ScalarField& h, const ScalarField& q,
                                   const LogisticOptions& opts = {});

/// ||d Lap theta + theta (h - q theta)||_inf evaluated on the split representation.
double logistic_residual(double d, const ScalarField& h, const ScalarField& q, const SplitField& theta);
double logistic_residual(double d, const ScalarField& h, const SplitField& theta);

struct TrajectoryRow {
    double t = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double mean_u = 0.0;
    double distance_to_target = 0.0;  // NaN without a target
};

struct LogisticTrajectory {
    std::vector<TrajectoryRow> rows;
    ScalarField final_state;
    long steps = 0;
};

struct MarchOptions {
    StepSchedule schedule{};
    /// Record a row every `record_every` steps (and always the last one).
    long record_every = 20;
    std::optional<ScalarField> target;
};

/// Time march of the logistic equation with the linearly implicit stepper.
/// Throws SolverError when ||u||_inf exceeds 10 max(sup h+ + 1, max u0).
LogisticTrajectory march_logistic(double d, const ScalarField& h, const ScalarField& u0, double T,
                                  const MarchOptions& opts = {});

struct ThetaLimitsReport {
    double small_d = 1e-4;
    double small_d_distance = 0.0;  // to h+, outside the boundary-layer band
    int excluded_nodes = 0;
    double large_d = 1e4;
    double large_d_distance = 0.0;  // to average(h)
};

/// Report only. Band: nodes within 5 sqrt(d) of a sign change of h are excluded.
ThetaLimitsReport theta_limits_check(const ScalarField& h, double small_d = 1e-4, double large_d = 1e4);

}  // namespace lvdiff
