#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lvdiff/competition.hpp"
#include "lvdiff/grid.hpp"
#include "lvdiff/logistic.hpp"
#include "lvdiff/stepping.hpp"

namespace lvdiff {

/// U_t = d1 Lap U + U (r1 - b1 U - a1 V/(U + k1)),
/// V_t = d2 Lap V + V (r2 - a2 V/(U + k2)).
struct LeslieGowerParams {
    double d1 = 1.0, d2 = 1.0;
    double b1 = 1.0, a1 = 1.0, a2 = 1.0, k1 = 1.0, k2 = 1.0;
    ScalarField r1;
    ScalarField r2;

    /// a1 k2 / (a2 k1)
    double ratio() const { return a1 * k2 / (a2 * k1); }
};

void validate(const LeslieGowerParams& p);

struct InvariantRegion {
    double M1 = 0.0, M2 = 0.0;
    double u_cap = 0.0;
    double v_cap = 0.0;
    double K_V = 0.0;  // a2 b1 / (M1 + b1 k2)
};

InvariantRegion invariant_region(const LeslieGowerParams& p);

struct SandwichConstants {
    double gamma11 = 0.0, eta11 = 0.0, gamma12 = 0.0, eta12 = 0.0;
};

SandwichConstants sandwich_constants(const LeslieGowerParams& p);

struct ConditionReport {
    double ratio = 0.0;
    double alpha = 0.0, beta = 0.0;
    bool C1 = false, C2 = false, C3 = false;
    bool A1 = false, A2 = false, A3 = false;
    /// r1 == alpha theta_{d2,r2} within 1e-8 relative.
    bool excluded = false;
    double excluded_distance = 0.0;
    Region region = Region::D_zero;
    double mu1_value = 0.0;
    bool in_I = false, in_I1 = false, in_I2 = false;
    std::optional<double> phi;  // boundary curve at d2 when d2 is in I

    nlohmann::json to_json() const;
};

/// Comparisons against alpha and beta use a relative slack of 1e-9 so that
/// parameters constructed at the endpoints classify as intended.
ConditionReport check_conditions(const LeslieGowerParams& p, const std::optional<AlphaBeta>& ab = std::nullopt);

struct MlgOptions {
    StepSchedule schedule{};
    long record_every = 1;
    std::optional<std::pair<ScalarField, ScalarField>> target;
};

struct MlgRow {
    PairRow extrema;
    double distance = 0.0;  // NaN without a target
};

struct MlgTrajectory {
    std::vector<MlgRow> rows;
    ScalarField U;
    ScalarField V;
    double t_end = 0.0;
    long steps = 0;
    bool started_inside = false;
    /// Largest overshoot of [0, cap] over all steps, either component.
    double max_excursion = 0.0;
    bool left_region = false;
};

/// Linearly implicit run; exits from the invariant region are tracked at every step.
MlgTrajectory simulate_mlg(const LeslieGowerParams& p, const ScalarField& u0, const ScalarField& v0, double T,
                           const MlgOptions& opts = {});

struct EnvelopeReport {
    bool ok = true;
    double worst_u_ratio = 0.0;  // max over rows of max U / U~(t)
    double worst_v_ratio = 0.0;
    double u_limit = 0.0;  // envelope value as t -> inf
    double v_limit = 0.0;
};

/// Closed-form logistic envelopes with growth M1 (U) and M2 (V):
///   U~(t) = U0 M1 / ((M1 - b1 U0) e^{-M1 t} + b1 U0),
///   V~(t) = V0 M2 / ((M2 - K_V V0) e^{-M2 t} + K_V V0).
double envelope_u(const InvariantRegion& a, double b1, double u0, double t);
double envelope_v(const InvariantRegion& a, double v0, double t);
EnvelopeReport envelope_check(const LeslieGowerParams& p, const MlgTrajectory& traj, double rel_slack = 1e-10);

struct SandwichReport {
    bool ordering_ok = true;
    double max_violation = 0.0;
    double first_violation_time = -1.0;
    ScalarField U11, V11, U12, V12, U, V;
    /// (theta_{d1, r1~j}/b1, theta_{d2,r2}/eta1j) and the distances to them at T.
    std::array<std::optional<std::pair<ScalarField, ScalarField>>, 2> limits;
    std::array<double, 2> limit_distance{};
};

/// Integrates the full system and the two comparison systems with identical
/// steps. Throws SolverError on an ordering violation beyond `slack` unless
/// `throw_on_violation` is false.
SandwichReport run_sandwich(const LeslieGowerParams& p, const ScalarField& u0, const ScalarField& v0, double T,
                            const StepSchedule& schedule = {}, double slack = 1e-9, bool throw_on_violation = true);

struct PersistenceRow {
    int run = 0;
    double floor_u = 0.0;
    double floor_v = 0.0;
    double delta = 0.0;
};

struct PersistenceReport {
    double delta = 0.0;
    std::vector<PersistenceRow> rows;
    bool ok = true;
};

/// delta = min(min theta_{d1, r1~11}/b1, min theta_{d2,r2}/eta11) / 2; floors are
/// the minimum of min_x over the last 10% of the run.
double persistence_delta(const LeslieGowerParams& p);
PersistenceReport persistence_floor(const LeslieGowerParams& p, int runs, double T, std::uint64_t seed,
                                    unsigned threads = 1);

struct CoexistencePair {
    SplitField U;
    SplitField v;
    double w_lower = 0.0;  // min r2 (U* + k2)/a2
    double w_upper = 0.0;  // max r2 (U* + k2)/a2
    double residual = 0.0;  // coupled system, max-norm
    bool residual_ok = false;
    std::vector<double> gas_distances;  // per random start, at the end of the run
};

/// U* from the r1 - (a1/a2) theta_{d2,r2} logistic problem, v* from the
/// crowded logistic problem with q = a2/(U* + k2). Requires k1 = k2.
/// `gas_runs` random starts are simulated for `gas_T` when positive.
CoexistencePair coexistence_pair(const LeslieGowerParams& p, int gas_runs = 0, double gas_T = 0.0,
                                 std::uint64_t seed = 1);

/// Max-norm residual of the coupled elliptic system at (u, v).
double mlg_residual(const LeslieGowerParams& p, const SplitField& u, const SplitField& v);

struct ExploreRun {
    int run = 0;
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
    double distance_to_first = 0.0;
};

/// Open regime: ratio <= alpha with k2 > k1. Logs final states of random runs;
/// no outcome is asserted.
std::vector<ExploreRun> explore(const LeslieGowerParams& p, int runs, double T, std::uint64_t seed);

}  // namespace lvdiff
