#include "lvdiff/suites.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "lvdiff/competition.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/leslie_gower.hpp"
#include "lvdiff/logistic.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/scenarios.hpp"
#include "lvdiff/spectral.hpp"

namespace lvdiff {

using nlohmann::json;
using std::numbers::pi;

json SuiteReport::to_json() const {
    json checks_j = json::array();
    for (const auto& c : checks)
        checks_j.push_back({{"name", c.name}, {"pass", c.pass}, {"clause", c.clause}, {"detail", c.detail}});
    return {{"suite", suite}, {"statement", statement}, {"pass", pass}, {"checks", checks_j}};
}

std::string SuiteReport::summary() const {
    std::ostringstream os;
    os << suite << ": " << (pass ? "PASS" : "FAIL") << " (" << statement << ")\n";
    for (const auto& c : checks) {
        os << "  " << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (!c.pass) os << ": violated \"" << c.clause << "\"";
        os << '\n';
    }
    return os.str();
}

namespace {

struct Context {
    const ExperimentConfig& cfg;
    Grid grid;
    Rng rng;
    SuiteReport& rep;

    void check(std::string name, bool pass, std::string clause, json detail = json::object()) {
        rep.pass = rep.pass && pass;
        rep.checks.push_back({std::move(name), pass, std::move(clause), std::move(detail)});
    }
    int samples(int fallback) const { return static_cast<int>(cfg.param_or("samples", fallback)); }
    int runs(int fallback) const { return static_cast<int>(cfg.param_or("runs", fallback)); }
    ScalarField x_field(const std::function<double(double)>& f) const {
        return ScalarField::sample(grid, [&](double x, double) { return f(x); });
    }
    ScalarField weight_or(const char* key, const std::function<double(double)>& f) const {
        return cfg.has_rate(key) ? cfg.rate(key, grid) : x_field(f);
    }
    RatePair pair() const {
        if (cfg.has_rate("r1") && cfg.has_rate("r2")) {
            RatePair rp{cfg.rate("r1", grid), cfg.rate("r2", grid)};
            require_h1(rp.r1, rp.r2);
            return rp;
        }
        return standard_pair(grid);
    }
};

double lambda_value(const Lambda1Result& r) { return std::get<SpectralResult>(r).eigenvalue; }

// -------------------------------------------------------------------------

void suite_lemma21(Context& c) {
    c.rep.statement = "principal eigenvalue of the indefinite-weight problem";
    const int n = c.samples(20);
    int wrong[3] = {0, 0, 0};
    double dense_gap = 0.0;
    for (auto sign : {IntegralSign::positive, IntegralSign::negative, IntegralSign::zero}) {
        for (int k = 0; k < n; ++k) {
            const ScalarField h = random_weight(c.grid, c.rng, sign);
            const auto r = lambda1(h);
            if (sign == IntegralSign::zero) {
                wrong[2] += !std::holds_alternative<NoNonzeroPrincipal>(r);
                continue;
            }
            if (!std::holds_alternative<SpectralResult>(r)) {
                ++wrong[sign == IntegralSign::positive ? 0 : 1];
                continue;
            }
            const double lam = lambda_value(r);
            if (sign == IntegralSign::positive) wrong[0] += !(lam < 0.0);
            else wrong[1] += !(lam > 0.0);
            if (k < 3 && c.grid.size() <= kDenseLimit)
                dense_gap = std::max(dense_gap, std::abs(lambda_value(lambda1_dense(h)) - lam) / std::abs(lam));
        }
    }
    c.check("positive_integral", wrong[0] == 0, "a positive weight integral gives a negative principal eigenvalue",
            {{"samples", n}, {"failures", wrong[0]}});
    c.check("negative_integral", wrong[1] == 0, "a negative weight integral gives a positive principal eigenvalue",
            {{"samples", n}, {"failures", wrong[1]}});
    c.check("zero_integral", wrong[2] == 0, "a zero weight integral leaves zero as the only principal eigenvalue",
            {{"samples", n}, {"failures", wrong[2]}});
    if (c.grid.size() <= kDenseLimit)
        c.check("dense_oracle", dense_gap <= 1e-8, "iterative and dense principal eigenvalues agree to 1e-8",
                {{"max_relative_gap", dense_gap}});

    int order_fail = 0;
    for (int k = 0; k < std::max(1, n / 2); ++k) {
        const ScalarField h = random_weight(c.grid, c.rng, IntegralSign::negative);
        const ScalarField bump = random_positive_field(c.grid, c.rng, 0.0, 1.0);
        const ScalarField kw = h + (0.5 * std::abs(average(h)) / average(bump)) * bump;
        order_fail += !(lambda_value(lambda1(h)) > lambda_value(lambda1(kw)));
    }
    c.check("comparison", order_fail == 0, "a larger weight has a smaller positive principal eigenvalue",
            {{"failures", order_fail}});

    const ScalarField h = c.x_field([](double x) { return std::cos(2 * pi * x) - 0.5; });
    const ScalarField delta = 1e-4 * random_cosine_field(c.grid, c.rng);
    const double jump = std::abs(lambda_value(lambda1(h + delta)) - lambda_value(lambda1(h)));
    c.check("continuity", jump <= 1e-2, "the principal eigenvalue depends continuously on the weight",
            {{"perturbation", 1e-4}, {"change", jump}});

    bool threw = false;
    try {
        (void)lambda1(c.x_field([](double x) { return 1.0 + x; }));
    } catch (const PreconditionError&) {
        threw = true;
    }
    c.check("sign_definite_rejected", threw, "the principal theory needs a weight that changes sign");
}

void suite_lemma22(Context& c) {
    c.rep.statement = "sign, monotonicity and limits of mu1 in d";
    const ScalarField h = c.weight_or("h", [](double x) { return std::cos(2 * pi * x) - 0.5; });
    const WeightClass wc = classify_weight(h);
    if (wc.integral_sign != IntegralSign::negative || !wc.changes_sign)
        throw ConfigError("lemma22 needs a sign-changing weight h with negative integral");
    const double lam = lambda_value(lambda1(h));
    const double lam_b = lambda1_by_bisection(h);
    const double below = mu1(0.5 / lam, h).eigenvalue;
    const double at = mu1(1.0 / lam_b, h).eigenvalue;
    const double above = mu1(2.0 / lam, h).eigenvalue;
    c.check("bisection_oracle", std::abs(lam - lam_b) <= 1e-6 * lam,
            "mu1 vanishes exactly at d = 1/lambda1", {{"lambda1", lam}, {"bisection", lam_b}});
    c.check("below_threshold", below < 0.0, "mu1 is negative for d below 1/lambda1", {{"mu1", below}});
    c.check("at_threshold", std::abs(at) <= 1e-6, "mu1 is zero at d = 1/lambda1", {{"mu1", at}});
    c.check("above_threshold", above > 0.0, "mu1 is positive for d above 1/lambda1", {{"mu1", above}});

    const ScalarField hz = c.x_field([](double x) { return std::cos(2 * pi * x); });
    bool neg = true;
    for (double d : {0.01, 0.1, 1.0, 10.0}) neg = neg && mu1(d, hz).eigenvalue < 0.0;
    c.check("zero_integral_negative", neg, "a zero-integral nonzero weight gives negative mu1 for every d");
    const double pos = mu1(1.0, c.x_field([](double x) { return -x; })).eigenvalue;
    c.check("nonpositive_weight", pos > 0.0, "a non-positive nonzero weight gives positive mu1", {{"mu1", pos}});

    const Mu1LimitsReport lim = mu1_limits_check(hz);
    c.check("increasing", lim.increasing, "mu1 is strictly increasing in d");
    c.check("concave", lim.concave, "mu1 is concave in d");
    c.check("small_d_limit", std::abs(lim.small_d_value - lim.small_d_limit) <= 0.05,
            "mu1 tends to min(-h) as d tends to 0", {{"value", lim.small_d_value}, {"limit", lim.small_d_limit}});
    c.check("large_d_limit", std::abs(lim.large_d_value - lim.large_d_limit) <= 1e-3,
            "mu1 tends to -average(h) as d tends to infinity",
            {{"value", lim.large_d_value}, {"limit", lim.large_d_limit}});

    int fail = 0;
    for (int k = 0; k < c.samples(20); ++k) {
        const ScalarField hh = random_cosine_field(c.grid, c.rng);
        const ScalarField kk = hh + random_positive_field(c.grid, c.rng, 0.0, 0.5);
        const double d = std::pow(10.0, std::uniform_real_distribution<double>(-2, 1)(c.rng));
        fail += !(mu1(d, hh).eigenvalue > mu1(d, kk).eigenvalue);
    }
    c.check("comparison", fail == 0, "a larger weight gives a smaller mu1", {{"failures", fail}});
}

void suite_lemma23(Context& c) {
    c.rep.statement = "logistic steady state: existence, stability and limits";
    const ScalarField h = c.weight_or("h", [](double x) { return 1.0 + 0.5 * std::cos(2 * pi * x); });
    bool residual_ok = true, inequality_ok = true, neutral_ok = true, stable_ok = true;
    json det = json::array();
    for (double d : {0.01, 1.0, 100.0}) {
        const ExistenceVerdict ev = classify_existence(d, h);
        if (ev.existence != Existence::unique_positive) {
            c.check("existence_d" + std::to_string(d), false, "a positive steady state exists for this weight",
                    {{"reason", ev.reason}});
            continue;
        }
        const auto th = solve_theta(d, h);
        const double neutral = mu1(d, h - th.theta).eigenvalue;
        const double stab = mu1(d, h - 2.0 * th.theta).eigenvalue;
        residual_ok = residual_ok && th.solver_residual <= 1e-10;
        inequality_ok = inequality_ok && (is_constant(h) || integrate(h) < integrate(th.theta));
        neutral_ok = neutral_ok && std::abs(neutral) <= 1e-6;
        stable_ok = stable_ok && stab > 0.0;
        det.push_back({{"d", d}, {"residual", th.solver_residual}, {"int_h", integrate(h)},
                       {"int_theta", integrate(th.theta)}, {"mu_neutral", neutral}, {"mu_stable", stab}});
    }
    c.check("residual", residual_ok, "the steady state solves the equation to 1e-10", det);
    c.check("integral_inequality", inequality_ok, "the integral of h is below the integral of theta");
    c.check("neutral_linearization", neutral_ok, "mu1(d, h - theta) is zero");
    c.check("stable_linearization", stable_ok, "mu1(d, h - 2 theta) is positive");

    LogisticOptions lo;
    lo.cross_validate = true;
    const auto th1 = solve_theta(1.0, h, lo);
    const double march_gap = th1.cross_check_distance.value_or(INFINITY);
    c.check("time_march_oracle", march_gap <= 1e-6, "a long time march reaches the same steady state",
            {{"distance", march_gap}});

    double worst = 0.0;
    for (int k = 0; k < c.runs(5); ++k) {
        const ScalarField u0 = random_positive_field(c.grid, c.rng, 0.05, 2.0);
        const auto tr = march_logistic(1.0, h, u0, 500.0);
        worst = std::max(worst, distance_inf(tr.final_state, th1.theta));
    }
    c.check("global_attraction", worst <= 1e-6, "every positive start converges to theta", {{"worst", worst}});

    const ThetaLimitsReport tl = theta_limits_check(h);
    c.check("large_d_limit", tl.large_d_distance <= 1e-3, "theta tends to the average of h as d tends to infinity",
            {{"distance", tl.large_d_distance}});
    c.check("small_d_limit", tl.small_d_distance <= 0.02, "theta tends to the positive part of h as d tends to 0",
            {{"distance", tl.small_d_distance}, {"excluded_nodes", tl.excluded_nodes}});

    const ScalarField hn = c.x_field([](double x) { return std::cos(2 * pi * x) - 0.5; });
    const double dx = 2.0 / lambda_value(lambda1(hn));
    const bool ext = classify_existence(dx, hn).existence == Existence::extinction;
    MarchOptions mo;
    mo.record_every = 1000000;
    const double left = norm_inf(march_logistic(dx, hn, ScalarField::constant(c.grid, 1.0), 1000.0, mo).final_state);
    c.check("extinction_above_threshold", ext && left <= 1e-6, "zero attracts every solution when d exceeds 1/lambda1",
            {{"d", dx}, {"final_max", left}});
    const ScalarField hneg = c.x_field([](double x) { return -1.0 - x; });
    c.check("extinction_nonpositive", classify_existence(1.0, hneg).existence == Existence::extinction,
            "zero attracts every solution when h is non-positive");
}

void suite_lemma31(Context& c) {
    c.rep.statement = "alpha is below beta";
    int fail = 0;
    json det = json::array();
    for (int k = 0; k < c.samples(5); ++k) {
        const auto [r1, r2] = random_h1_pair(c.grid, c.rng);
        const AlphaBeta ab = alpha_beta(r1, r2);
        fail += !(ab.alpha < ab.beta);
        det.push_back({{"alpha", ab.alpha}, {"beta", ab.beta}});
    }
    c.check("random_pairs", fail == 0, "alpha < beta", det);

    const ScalarField r1 = c.x_field([](double x) { return 1.0 + 0.5 * std::cos(2 * pi * x); });
    const ScalarField r2 = ScalarField::constant(c.grid, 1.5);
    const AlphaBeta ab = alpha_beta(r1, r2);
    const double ea = std::abs(ab.alpha - average(r1) / 1.5), eb = std::abs(ab.beta - sup_field(r1) / 1.5);
    c.check("constant_r2", ea <= 1e-10 && eb <= 1e-10,
            "with constant r2, alpha = avg(r1)/r2 and beta = sup(r1)/r2", {{"alpha_error", ea}, {"beta_error", eb}});

    const RatePair rp = c.pair();
    const double s = 0.7;
    const ScalarField r1s = s * solve_theta(0.3, rp.r2).theta;
    const AlphaBeta abs = alpha_beta(r1s, rp.r2);
    c.check("bracket", abs.alpha <= s * (1 + 1e-9) && s <= abs.beta * (1 + 1e-9),
            "r1 = s theta_{d2} forces alpha <= s <= beta", {{"alpha", abs.alpha}, {"beta", abs.beta}, {"s", s}});
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = std::pow(10.0, std::log10(a) + (std::log10(b) - std::log10(a)) * k / (n - 1));
    return v;
}

void suite_lemma32(Context& c) {
    c.rep.statement = "linear stability and the region map of the competition system";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const auto grid_d = logspace(1e-2, 1e2, 5);
    auto count = [&](double ratio, Region r) {
        int n = 0;
        for (double d2 : grid_d) {
            const ScalarField th = solve_theta(d2, rp.r2).theta;
            for (double d1 : grid_d) n += classify_weight_at(d1, rp.r1, th, ratio).region == r;
        }
        return n;
    };
    const int total = static_cast<int>(grid_d.size() * grid_d.size());
    const int low = count(0.5 * ab.alpha, Region::D_minus);
    const int high = count(1.2 * ab.beta, Region::D_plus);
    c.check("below_alpha", low == total, "below alpha every dispersal pair lies in D-", {{"cells", total}, {"hits", low}});
    c.check("above_beta", high == total, "at or above beta every dispersal pair lies in D+",
            {{"cells", total}, {"hits", high}});

    const double mid = 0.5 * (ab.alpha + ab.beta);
    bool found = false;
    for (double d2 : logspace(1e-2, 1e2, 9)) {
        const ScalarField th = solve_theta(d2, rp.r2).theta;
        const IndexSets s = index_sets(rp.r1, th, mid);
        if (!s.in_I2) continue;
        found = true;
        const PhiTilde phi = phi_tilde(rp.r1, th, mid);
        const ScalarField w = rp.r1 - mid * th;
        const double up = mu1(phi.value * (1 + 1e-3), w).eigenvalue;
        const double dn = mu1(phi.value * (1 - 1e-3), w).eigenvalue;
        const double on = mu1(phi.value, w).eigenvalue;
        c.check("boundary_curve", up > 0.0 && dn < 0.0 && std::abs(on) <= 1e-6 &&
                                      std::abs(phi.value - phi.bisection) <= 1e-6 * phi.value,
                "D+ is exactly the set d1 > phi(d2) on I2",
                {{"d2", d2}, {"phi", phi.value}, {"bisection", phi.bisection}, {"mu_above", up}, {"mu_below", dn},
                 {"mu_on", on}});
        break;
    }
    if (!found) c.check("boundary_curve", false, "the mid regime has some d2 in I2", {{"ratio", mid}});

    CompetitionParams p{1.0, 1.0, 1.0, 1.2 * ab.beta, 1.0, rp.r1, rp.r2};
    const SteadyStateCatalog cat = steady_state_catalog(p);
    c.check("trivial_unstable", cat.trivial.stability.tag == Stability::unstable, "(0, 0) is linearly unstable",
            {{"eigenvalue", cat.trivial.stability.eigenvalue}});
    c.check("prey_only_unstable", cat.semi_trivial_u.stability.tag == Stability::unstable,
            "the state without the second species is linearly unstable",
            {{"eigenvalue", cat.semi_trivial_u.stability.eigenvalue}});
    c.check("competitor_only_stable", cat.semi_trivial_v.stability.tag == Stability::stable,
            "the state without the first species is linearly stable in D+",
            {{"eigenvalue", cat.semi_trivial_v.stability.eigenvalue}});
    c.check("no_coexistence_in_D_plus", !cat.coexistence.has_value(), "there is no coexistence state in D+");
}

void suite_lemma33(Context& c) {
    c.rep.statement = "the set of d2 with r1 proportional to theta_{d2,r2}";
    const ScalarField varying = c.x_field([](double x) { return 1.0 + 0.5 * std::cos(pi * x); });
    const ScalarField flat = ScalarField::constant(c.grid, 1.0);
    const auto e1 = e_s_dichotomy(1.0, flat, varying);
    const auto e2 = e_s_dichotomy(1.0, varying, flat);
    c.check("r1_constant", !e1.d2_star, "the set is empty when only r1 is constant");
    c.check("r2_constant", !e2.d2_star, "the set is empty when only r2 is constant");

    double worst = 0.0;
    for (double d2o : {0.1, 1.0, 10.0}) {
        const double s = 0.8;
        const ScalarField r1 = s * solve_theta(d2o, varying).theta;
        const auto e = e_s_dichotomy(s, r1, varying);
        worst = std::max(worst, e.d2_star ? std::abs(*e.d2_star - d2o) / d2o : INFINITY);
    }
    c.check("round_trip", worst <= 1e-4, "r1 = s theta_{d2} recovers d2 from the closed form", {{"worst", worst}});
    const ScalarField other = c.x_field([](double x) { return 1.0 + 0.4 * std::sin(3 * pi * x); });
    c.check("unrelated", !e_s_dichotomy(1.0, other, varying).d2_star, "an unrelated r1 admits no such d2");
}

std::string expected_attractor(Region r) { return r == Region::D_minus ? "coexistence" : "semi_trivial_v"; }

void suite_theorem34(Context& c) {
    c.rep.statement = "global dynamics of the competition system";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = c.samples(3);
    const char* names[3] = {"below_alpha", "between", "above_beta"};
    for (int regime = 0; regime < 3; ++regime) {
        int mism = 0, skipped = 0;
        json det = json::array();
        for (int k = 0; k < n; ++k) {
            double ratio = 0.0;
            if (regime == 0) ratio = (0.2 + 0.7 * u01(c.rng)) * ab.alpha;
            else if (regime == 1) ratio = ab.alpha + (0.1 + 0.8 * u01(c.rng)) * (ab.beta - ab.alpha);
            else ratio = (1.05 + u01(c.rng)) * ab.beta;
            const double d1 = std::pow(10.0, -3 + 4 * u01(c.rng));
            const double d2 = std::pow(10.0, -2 + 4 * u01(c.rng));
            CompetitionParams p{d1, d2, 1.0, ratio, 1.0, rp.r1, rp.r2};
            const RegionVerdict v = classify_point(p);
            if (std::abs(v.mu1_value) <= 1e-6) {
                ++skipped;
                continue;
            }
            const auto cat = steady_state_catalog(p);
            const auto tr = simulate_competition(p, random_positive_field(c.grid, c.rng, 0.1, 1.5),
                                                 random_positive_field(c.grid, c.rng, 0.1, 1.5), 2000.0, cat);
            const bool ok = tr.attractor == expected_attractor(v.region);
            mism += !ok;
            det.push_back({{"d1", d1}, {"d2", d2}, {"ratio", ratio}, {"region", to_string(v.region)},
                           {"mu1", v.mu1_value}, {"attractor", tr.attractor}});
        }
        c.check(names[regime], mism == 0,
                "D+ and D0 send every positive start to (0, theta_{d2,r2}/c2); D- sends it to the coexistence state",
                {{"draws", n}, {"skipped_degenerate", skipped}, {"mismatches", mism}, {"cases", det}});
    }

    CompetitionParams p{0.1, 0.5, 1.0, 0.5 * ab.alpha, 2.0, rp.r1, rp.r2};
    const auto cat = steady_state_catalog(p);
    SimulationOptions so;
    so.max_horizon = 50.0;
    const ScalarField v0 = random_positive_field(c.grid, c.rng, 0.1, 1.0);
    const auto tr = simulate_competition(p, ScalarField::constant(c.grid, 0.5), v0, 50.0, cat, so);
    MarchOptions mo;
    mo.record_every = 1000000;
    const auto lt = march_logistic(p.d2, p.r2, p.c2 * v0, 50.0, mo);
    bool identical = true;
    for (std::size_t i = 0; i < c.grid.size(); ++i) identical = identical && lt.final_state[i] / p.c2 == tr.V[i];
    c.check("triangular_structure", identical,
            "the second species evolves independently of the first (bit-identical to a standalone march)");
}

LeslieGowerParams with_d(LeslieGowerParams p, double d1, double d2) {
    p.d1 = d1;
    p.d2 = d2;
    return p;
}

void suite_lemma43(Context& c) {
    c.rep.statement = "region map of the predator-prey system";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const auto grid_d = logspace(1e-2, 1e2, 4);
    auto count = [&](const LeslieGowerParams& base, Region r) {
        int n = 0;
        for (double d2 : grid_d)
            for (double d1 : grid_d) n += check_conditions(with_d(base, d1, d2), ab).region == r;
        return n;
    };
    const int total = static_cast<int>(grid_d.size() * grid_d.size());
    const int empty = count(scenarios::a1(rp, ab), Region::D_plus);
    const int full = count(scenarios::c1(rp, ab), Region::D_plus);
    c.check("ratio_below_alpha", empty == 0, "D+ is empty when the ratio is at most alpha", {{"d_plus_cells", empty}});
    c.check("ratio_above_beta", full == total, "D+ is everything when the ratio is at least beta",
            {{"d_plus_cells", full}, {"cells", total}});

    LeslieGowerParams mid = scenarios::c2(rp, ab);
    int flips = 0, tried = 0;
    for (double d2 : grid_d) {
        const auto rep = check_conditions(with_d(mid, 1.0, d2), ab);
        if (!rep.in_I2 || !rep.phi || *rep.phi <= 0.0) continue;
        ++tried;
        const auto above = check_conditions(with_d(mid, *rep.phi * 1.01, d2), ab).region;
        const auto below = check_conditions(with_d(mid, *rep.phi * 0.99, d2), ab).region;
        flips += above == Region::D_plus && below == Region::D_minus;
    }
    c.check("boundary_flip", tried > 0 && flips == tried, "D+ is the set d1 > phi(d2) for d2 in I2",
            {{"columns", tried}, {"flips", flips}});
}

void suite_lemma44(Context& c) {
    c.rep.statement = "invariant region and logistic envelopes";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const LeslieGowerParams p = scenarios::a1(rp, ab);
    const InvariantRegion a = invariant_region(p);
    int exits = 0, env_fail = 0;
    double worst_exc = 0.0, worst_u = 0.0, worst_v = 0.0;
    for (int k = 0; k < c.samples(20); ++k) {
        const ScalarField u0 = random_positive_field(c.grid, c.rng, 0.0, a.u_cap);
        const ScalarField v0 = random_positive_field(c.grid, c.rng, 0.0, a.v_cap);
        const auto tr = simulate_mlg(p, u0, v0, 50.0);
        exits += tr.max_excursion > 1e-12;
        worst_exc = std::max(worst_exc, tr.max_excursion);
        const auto env = envelope_check(p, tr);
        env_fail += !env.ok;
        worst_u = std::max(worst_u, env.worst_u_ratio);
        worst_v = std::max(worst_v, env.worst_v_ratio);
    }
    c.check("invariance", exits == 0, "solutions starting in the box stay in the box",
            {{"worst_excursion", worst_exc}, {"u_cap", a.u_cap}, {"v_cap", a.v_cap}});
    c.check("envelopes", env_fail == 0, "max U and max V stay below the logistic envelopes",
            {{"worst_u_ratio", worst_u}, {"worst_v_ratio", worst_v}});
}

void suite_lemma45(Context& c) {
    c.rep.statement = "comparison systems bracket the predator-prey solution";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const LeslieGowerParams p = scenarios::a1(rp, ab);
    const auto cond = check_conditions(p, ab);
    c.check("hypothesis", cond.A1, "the constructed parameters satisfy the persistence hypothesis", cond.to_json());
    const InvariantRegion a = invariant_region(p);
    int bad = 0;
    double worst_violation = 0.0, worst_limit = 0.0;
    for (int k = 0; k < c.runs(3); ++k) {
        const ScalarField u0 = random_positive_field(c.grid, c.rng, 0.0, a.u_cap);
        const ScalarField v0 = random_positive_field(c.grid, c.rng, 0.0, a.v_cap);
        const auto s = run_sandwich(p, u0, v0, 300.0, {}, 1e-9, false);
        bad += !s.ordering_ok;
        worst_violation = std::max(worst_violation, s.max_violation);
        worst_limit = std::max({worst_limit, s.limit_distance[0], s.limit_distance[1]});
    }
    c.check("ordering", bad == 0, "U11 <= U <= U12 and V11 <= V <= V12 at every step",
            {{"worst_violation", worst_violation}});
    c.check("limits", worst_limit <= 1e-4, "each comparison system converges to its logistic limit",
            {{"worst_distance", worst_limit}});

    LeslieGowerParams eq = p;
    eq.k2 = eq.k1;
    const SandwichConstants sc = sandwich_constants(eq);
    const double gap = std::abs(sc.gamma11 / sc.eta11 - sc.gamma12 / sc.eta12);
    c.check("equal_k_limits_coincide", gap <= 1e-14 * (sc.gamma11 / sc.eta11),
            "with k1 = k2 both comparison systems share the prey limit", {{"gap", gap}});
}

void suite_theorem41(Context& c) {
    c.rep.statement = "extinction of the prey";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const std::pair<const char*, LeslieGowerParams> sets[] = {
        {"C1", scenarios::c1(rp, ab)}, {"C2", scenarios::c2(rp, ab)}, {"C3", scenarios::c3(rp.r2)}};
    for (const auto& [tag, p] : sets) {
        const auto cond = check_conditions(p, std::string(tag) == "C3" ? std::optional<AlphaBeta>{} : ab);
        const bool holds = (std::string(tag) == "C1" && cond.C1) || (std::string(tag) == "C2" && cond.C2) ||
                           (std::string(tag) == "C3" && cond.C3);
        const bool region_ok = cond.region != Region::D_minus;
        const ScalarField vt = (p.k2 / p.a2) * solve_theta(p.d2, p.r2).theta;
        const InvariantRegion a = invariant_region(p);
        MlgOptions o;
        o.record_every = 1000000;
        const auto tr = simulate_mlg(p, random_positive_field(c.grid, c.rng, 0.1, a.u_cap),
                                     random_positive_field(c.grid, c.rng, 0.1, a.v_cap), 5000.0, o);
        const double dist = std::max(norm_inf(tr.U), distance_inf(tr.V, vt));
        c.check(std::string(tag) + "_convergence", holds && region_ok && dist <= 1e-4,
                "(0, k2 theta_{d2,r2}/a2) attracts every positive start on D+ and D0",
                {{"conditions", cond.to_json()}, {"distance", dist}});
    }
}

void suite_theorem42(Context& c) {
    c.rep.statement = "persistence and the coexistence state of the predator-prey system";
    const RatePair rp = c.pair();
    const AlphaBeta ab = alpha_beta(rp.r1, rp.r2);
    const LeslieGowerParams p = scenarios::a1(rp, ab);
    const PersistenceReport pr = persistence_floor(p, c.runs(5), 300.0, c.cfg.seed);
    json rows = json::array();
    for (const auto& r : pr.rows) rows.push_back({{"run", r.run}, {"floor_u", r.floor_u}, {"floor_v", r.floor_v}});
    c.check("persistence", pr.ok, "both species eventually stay above a uniform positive floor",
            {{"delta", pr.delta}, {"runs", rows}});

    const LeslieGowerParams q = scenarios::a2_flat_prey(rp.r2);
    const auto cond = check_conditions(q);
    const CoexistencePair cp = coexistence_pair(q, c.runs(5), 500.0, c.cfg.seed);
    double worst = 0.0;
    for (double d : cp.gas_distances) worst = std::max(worst, d);
    c.check("coexistence_state", cond.A2 && cp.residual_ok, "the coexistence pair solves the steady system",
            {{"residual", cp.residual}, {"A2", cond.A2}});
    c.check("global_attraction", worst <= 1e-4, "the positive coexistence state attracts every positive start",
            {{"worst_distance", worst}});
}

const std::map<std::string, void (*)(Context&)>& registry() {
    static const std::map<std::string, void (*)(Context&)> r = {
        {"lemma21", suite_lemma21},   {"lemma22", suite_lemma22}, {"lemma23", suite_lemma23},
        {"lemma31", suite_lemma31},   {"lemma32", suite_lemma32}, {"lemma33", suite_lemma33},
        {"theorem34", suite_theorem34}, {"lemma43", suite_lemma43}, {"lemma44", suite_lemma44},
        {"lemma45", suite_lemma45},   {"theorem41", suite_theorem41}, {"theorem42", suite_theorem42}};
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"lemma21", "lemma22", "lemma23", "lemma31",
                                                   "lemma32", "lemma33", "theorem34", "lemma43",
                                                   "lemma44", "lemma45", "theorem41", "theorem42"};
    return names;
}

SuiteReport run_suite(const std::string& name, const ExperimentConfig& cfg) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown suite '" + name + "'");
    SuiteReport rep;
    rep.suite = name;
    Context c{cfg, cfg.grid.make(), Rng(cfg.seed), rep};
    it->second(c);
    return rep;
}

}  // namespace lvdiff
