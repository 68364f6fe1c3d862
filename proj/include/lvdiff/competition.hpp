#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lvdiff/grid.hpp"
#include "lvdiff/logistic.hpp"
#include "lvdiff/stepping.hpp"

namespace lvdiff {

/// U_t = d1 Lap U + U (r1 - b1 U - c1 V),  V_t = d2 Lap V + V (r2 - c2 V).
struct CompetitionParams {
    double d1 = 1.0, d2 = 1.0;
    double b1 = 1.0, c1 = 1.0, c2 = 1.0;
    ScalarField r1;
    ScalarField r2;
};

/// Positivity of the constants plus the growth-rate hypothesis; throws ConfigError.
void validate(const CompetitionParams& p);

struct AlphaBetaOptions {
    int samples = 49;
    double d2_min = 1e-3;
    double d2_max = 1e3;
    unsigned threads = 1;
};

struct AlphaBeta {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> d2_samples;
    std::vector<double> alpha_samples;  // average(r1) / average(theta) per sample
    std::vector<double> beta_samples;   // sup(r1 / theta) per sample
    /// Where the extremum was attained: a sampled d2, 0 for the small-d limit,
    /// +inf for the large-d limit.
    double alpha_argmin = 0.0;
    double beta_argmax = 0.0;
};

/// alpha = inf over d2 of avg(r1)/avg(theta_{d2,r2}), beta = sup over d2 of
/// sup(r1/theta_{d2,r2}); log-grid samples plus the analytic endpoint limits
/// theta -> r2 (d2 -> 0) and theta -> avg(r2) (d2 -> inf).
AlphaBeta alpha_beta(const ScalarField& r1, const ScalarField& r2, const AlphaBetaOptions& opts = {});

enum class Region { D_plus, D_zero, D_minus };
const char* to_string(Region r);

struct RegionVerdict {
    Region region = Region::D_zero;
    double mu1_value = 0.0;
    ScalarField effective_weight;
    double tolerance = 0.0;
};

/// Sign of mu1(d1, r1 - ratio * theta) with the band 1e-8 (1 + ||w||_inf).
RegionVerdict classify_weight_at(double d1, const ScalarField& r1, const ScalarField& theta2, double ratio);
RegionVerdict classify_point(const CompetitionParams& p);

struct IndexSets {
    bool in_I = false;
    bool in_I1 = false;
    bool in_I2 = false;
    double integral = 0.0;
    double sup = 0.0;
};

IndexSets index_sets(const ScalarField& r1, const ScalarField& theta2, double ratio);
/// Uses p.d2 and ratio c1/c2.
IndexSets index_sets(const CompetitionParams& p);

struct PhiTilde {
    double value = 0.0;       // 0 on I1, 1/lambda1(w) on I2
    double bisection = 0.0;   // independent cross-check (equal to value on I1)
    bool on_I1 = false;
};

/// Boundary curve of D+ at a given theta_{d2,r2}. Throws PreconditionError when d2 is not in I.
PhiTilde phi_tilde(const ScalarField& r1, const ScalarField& theta2, double ratio);
PhiTilde phi_tilde(const CompetitionParams& p);

enum class EsCase { E1_r1_constant, E2_r2_constant, E3_both_varying, both_constant };
const char* to_string(EsCase c);

struct EsDichotomy {
    EsCase which = EsCase::both_constant;
    std::optional<double> d2_star;
    double candidate = 0.0;   // closed-form d2 (E3 only)
    double mismatch = 0.0;    // relative ||r1 - s theta|| at the candidate
};

/// Set of d2 with r1 == s theta_{d2,r2}. For two varying rates the closed form
/// d2 = int(r1/s - r2) / int |grad r1 / r1|^2 is verified against a solve to 1e-6.
/// Throws PreconditionError when r1 has zeros.
EsDichotomy e_s_dichotomy(double s, const ScalarField& r1, const ScalarField& r2);

enum class Stability { stable, unstable, degenerate };
const char* to_string(Stability s);

struct LinearStability {
    double eigenvalue = 0.0;  // least of the two diagonal-block principal eigenvalues
    double u_block = 0.0;
    double v_block = 0.0;
    Stability tag = Stability::degenerate;
};

/// Principal eigenvalue of the linearization at (u, v). The Jacobian is block
/// triangular, so its spectrum is the union of the diagonal-block spectra.
LinearStability linear_stability(const CompetitionParams& p, const ScalarField& u, const ScalarField& v);

struct SteadyState {
    std::string name;
    SplitField u;
    SplitField v;
    double residual = 0.0;
    LinearStability stability;
};

struct SteadyStateCatalog {
    SteadyState trivial;
    SteadyState semi_trivial_u;
    SteadyState semi_trivial_v;
    std::optional<SteadyState> coexistence;

    std::vector<const SteadyState*> states() const;
};

/// ||residual||_inf of the coupled elliptic system at (u, v).
double competition_residual(const CompetitionParams& p, const SplitField& u, const SplitField& v);

/// Coexistence pair (theta_{d1, r1~}/b1, theta_{d2,r2}/c2) with r1~ = r1 - c1 theta_{d2,r2}/c2,
/// present iff the r1~-logistic problem has a positive state.
std::optional<SteadyState> coexistence_state(const CompetitionParams& p);

SteadyStateCatalog steady_state_catalog(const CompetitionParams& p);

struct SimulationOptions {
    StepSchedule schedule{};
    long record_every = 200;
    /// Extend past T in chunks of T until the attractor is identified, up to this horizon.
    double max_horizon = 2e5;
    double margin = 10.0;
};

struct CompetitionTrajectory {
    std::vector<PairRow> rows;
    ScalarField U;
    ScalarField V;
    double t_end = 0.0;
    long steps = 0;
    std::string attractor;  // catalog name, or "undetermined"
    double attractor_distance = 0.0;
    double runner_up_distance = 0.0;
};

/// Coupled run with the linearly implicit stepper. The V equation is marched
/// as W = c2 V with the plain logistic kernel, so V matches a standalone
/// logistic march of (d2, r2) from c2 v0 divided by c2.
CompetitionTrajectory simulate_competition(const CompetitionParams& p, const ScalarField& u0, const ScalarField& v0,
                                           double T, const SteadyStateCatalog& catalog,
                                           const SimulationOptions& opts = {});

/// Nearest catalog state in the max-norm over both components. Returns the
/// name when the runner-up is at least `margin` times farther.
struct Identification {
    std::string name;
    double distance = 0.0;
    double runner_up = 0.0;
};
Identification identify_attractor(const SteadyStateCatalog& catalog, const ScalarField& U, const ScalarField& V,
                                  double margin);

}  // namespace lvdiff
