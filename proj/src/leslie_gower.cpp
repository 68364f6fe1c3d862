#include "lvdiff/leslie_gower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lvdiff/config.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/parallel.hpp"
#include "lvdiff/random_fields.hpp"
#include "lvdiff/spectral.hpp"

namespace lvdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEndpointSlack = 1e-9;

// Two diffusion steppers driven by a caller-supplied loss evaluation.
class PairMarcher {
public:
    PairMarcher(const Grid& g, double d1, double d2, const ScalarField& gu, const ScalarField& gv)
        : su_(g, d1), sv_(g, d2), gu_(gu.values()), gv_(gv.values()), lu_(g.size()), lv_(g.size()),
          un_(g.size()), vn_(g.size()) {}

    template <typename Loss>
    void step(std::vector<double>& U, std::vector<double>& V, double dt, Loss&& loss) {
        for (std::size_t i = 0; i < U.size(); ++i) loss(i, U[i], V[i], lu_[i], lv_[i]);
        su_.step(U, gu_, lu_, dt, un_);
        sv_.step(V, gv_, lv_, dt, vn_);
        U.swap(un_);
        V.swap(vn_);
        for (std::size_t i = 0; i < U.size(); ++i)
            if (!std::isfinite(U[i]) || !std::isfinite(V[i])) throw SolverError("non-finite value in predator-prey run");
    }

private:
    DiffusionStepper su_, sv_;
    std::vector<double> gu_, gv_, lu_, lv_, un_, vn_;
};

auto mlg_loss(const LeslieGowerParams& p) {
    return [&p](std::size_t, double U, double V, double& lu, double& lv) {
        lu = p.b1 * U + p.a1 * V / (U + p.k1);
        lv = p.a2 * V / (U + p.k2);
    };
}

PairRow extrema(double t, const std::vector<double>& U, const std::vector<double>& V) {
    PairRow r;
    r.t = t;
    const auto [umin, umax] = std::minmax_element(U.begin(), U.end());
    const auto [vmin, vmax] = std::minmax_element(V.begin(), V.end());
    r.u_min = *umin;
    r.u_max = *umax;
    r.v_min = *vmin;
    r.v_max = *vmax;
    return r;
}

double dist(const std::vector<double>& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

SplitField scaled(const SplitField& f, double s) { return SplitField{f.offset * s, s * f.deviation}; }

}  // namespace

void validate(const LeslieGowerParams& p) {
    for (auto [name, v] : {std::pair{"d1", p.d1}, {"d2", p.d2}, {"b1", p.b1}, {"a1", p.a1}, {"a2", p.a2},
                           {"k1", p.k1}, {"k2", p.k2}})
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("parameter ") + name + " must be positive");
    require_same_grid(p.r1.grid(), p.r2.grid(), "predator-prey parameters");
    require_h1(p.r1, p.r2);
}

InvariantRegion invariant_region(const LeslieGowerParams& p) {
    InvariantRegion a;
    a.M1 = sup_field(p.r1);
    a.M2 = sup_field(p.r2);
    a.u_cap = a.M1 / p.b1;
    a.v_cap = (a.M1 + p.b1 * p.k2) * a.M2 / (p.a2 * p.b1);
    a.K_V = p.a2 * p.b1 / (a.M1 + p.b1 * p.k2);
    return a;
}

SandwichConstants sandwich_constants(const LeslieGowerParams& p) {
    const double M1 = sup_field(p.r1);
    return SandwichConstants{p.a1 / p.k1, p.a2 / p.k2, p.a1 * p.b1 / (M1 + p.b1 * p.k1),
                             p.a2 * p.b1 / (M1 + p.b1 * p.k2)};
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json j = {{"ratio", ratio},
                        {"alpha", alpha},
                        {"beta", beta},
                        {"C1", C1},
                        {"C2", C2},
                        {"C3", C3},
                        {"A1", A1},
                        {"A2", A2},
                        {"A3", A3},
                        {"excluded_set", excluded},
                        {"excluded_distance", excluded_distance},
                        {"region", lvdiff::to_string(region)},
                        {"mu1", mu1_value},
                        {"in_I", in_I},
                        {"in_I1", in_I1},
                        {"in_I2", in_I2}};
    j["phi"] = phi ? nlohmann::json(*phi) : nlohmann::json(nullptr);
    return j;
}

ConditionReport check_conditions(const LeslieGowerParams& p, const std::optional<AlphaBeta>& ab_in) {
    validate(p);
    const AlphaBeta ab = ab_in ? *ab_in : alpha_beta(p.r1, p.r2);
    const auto th2 = solve_theta(p.d2, p.r2);
    ConditionReport r;
    r.ratio = p.ratio();
    r.alpha = ab.alpha;
    r.beta = ab.beta;
    const bool le_alpha = r.ratio <= r.alpha * (1.0 + kEndpointSlack);
    const bool ge_beta = r.ratio >= r.beta * (1.0 - kEndpointSlack);
    const bool between = !le_alpha && !ge_beta;
    const bool k_equal = p.k1 == p.k2;

    r.excluded_distance = distance_inf(p.r1, r.alpha * th2.theta) / norm_inf(p.r1);
    r.excluded = r.excluded_distance <= 1e-8;

    const RegionVerdict v = classify_weight_at(p.d1, p.r1, th2.theta, r.ratio);
    r.region = v.region;
    r.mu1_value = v.mu1_value;
    const IndexSets s = index_sets(p.r1, th2.theta, r.ratio);
    r.in_I = s.in_I;
    r.in_I1 = s.in_I1;
    r.in_I2 = s.in_I2;
    if (s.in_I1 || s.in_I2) r.phi = phi_tilde(p.r1, th2.theta, r.ratio).value;

    r.C1 = ge_beta && p.k1 >= p.k2;
    r.C2 = between && k_equal;
    r.C3 = le_alpha && p.k2 >= p.k1;
    r.A1 = le_alpha && p.k1 <= p.k2 && !r.excluded;
    r.A2 = le_alpha && k_equal && !r.excluded;
    r.A3 = between && k_equal && s.in_I2 && r.phi && p.d1 < *r.phi;
    return r;
}

MlgTrajectory simulate_mlg(const LeslieGowerParams& p, const ScalarField& u0, const ScalarField& v0, double T,
                           const MlgOptions& opts) {
    validate(p);
    const Grid& g = p.r1.grid();
    require_same_grid(g, u0.grid(), "simulate_mlg");
    require_same_grid(g, v0.grid(), "simulate_mlg");
    if (inf_field(u0) < 0.0 || inf_field(v0) < 0.0) throw PreconditionError("initial data must be non-negative");
    const InvariantRegion a = invariant_region(p);

    std::vector<double> U(u0.values()), V(v0.values());
    MlgTrajectory tr{{}, u0, v0, 0.0, 0, false, 0.0, false};
    tr.started_inside = inf_field(u0) >= 0.0 && sup_field(u0) <= a.u_cap && inf_field(v0) >= 0.0 &&
                        sup_field(v0) <= a.v_cap;
    auto record = [&](double t) {
        double d = kNaN;
        if (opts.target) d = std::max(dist(U, opts.target->first), dist(V, opts.target->second));
        tr.rows.push_back(MlgRow{extrema(t, U, V), d});
    };
    record(0.0);

    PairMarcher m(g, p.d1, p.d2, p.r1, p.r2);
    auto loss = mlg_loss(p);
    for_each_step(opts.schedule, T, [&](double t, double dt) {
        m.step(U, V, dt, loss);
        for (std::size_t i = 0; i < U.size(); ++i) {
            const double e = std::max({U[i] - a.u_cap, V[i] - a.v_cap, -U[i], -V[i]});
            tr.max_excursion = std::max(tr.max_excursion, e);
        }
        tr.t_end = t + dt;
        if (++tr.steps % opts.record_every == 0) record(tr.t_end);
        return true;
    });
    if (tr.rows.back().extrema.t != tr.t_end) record(tr.t_end);
    tr.left_region = tr.started_inside && tr.max_excursion > 1e-12 * std::max(1.0, std::max(a.u_cap, a.v_cap));
    tr.U = ScalarField(g, U);
    tr.V = ScalarField(g, V);
    return tr;
}

double envelope_u(const InvariantRegion& a, double b1, double u0, double t) {
    if (u0 == 0.0) return 0.0;
    return u0 * a.M1 / ((a.M1 - b1 * u0) * std::exp(-a.M1 * t) + b1 * u0);
}

double envelope_v(const InvariantRegion& a, double v0, double t) {
    if (v0 == 0.0) return 0.0;
    return v0 * a.M2 / ((a.M2 - a.K_V * v0) * std::exp(-a.M2 * t) + a.K_V * v0);
}

EnvelopeReport envelope_check(const LeslieGowerParams& p, const MlgTrajectory& traj, double rel_slack) {
    const InvariantRegion a = invariant_region(p);
    EnvelopeReport r;
    r.u_limit = a.M1 / p.b1;
    r.v_limit = a.M2 / a.K_V;
    if (traj.rows.empty()) return r;
    const double u0 = traj.rows.front().extrema.u_max;
    const double v0 = traj.rows.front().extrema.v_max;
    for (const auto& row : traj.rows) {
        const double eu = envelope_u(a, p.b1, u0, row.extrema.t);
        const double ev = envelope_v(a, v0, row.extrema.t);
        const double ru = eu > 0.0 ? row.extrema.u_max / eu : (row.extrema.u_max > 0.0 ? INFINITY : 0.0);
        const double rv = ev > 0.0 ? row.extrema.v_max / ev : (row.extrema.v_max > 0.0 ? INFINITY : 0.0);
        r.worst_u_ratio = std::max(r.worst_u_ratio, ru);
        r.worst_v_ratio = std::max(r.worst_v_ratio, rv);
    }
    r.ok = r.worst_u_ratio <= 1.0 + rel_slack && r.worst_v_ratio <= 1.0 + rel_slack;
    return r;
}

namespace {

std::optional<std::pair<ScalarField, ScalarField>> comparison_limit(const LeslieGowerParams& p,
                                                                    const LogisticSteadyState& th2, double gamma,
                                                                    double eta) {
    const ScalarField rt = p.r1 - (gamma / eta) * th2.theta;
    const ScalarField v = (1.0 / eta) * th2.theta;
    if (!(mu1(p.d1, rt).eigenvalue < -1e-12 * (1.0 + norm_inf(rt))))
        return std::pair{ScalarField::constant(rt.grid(), 0.0), v};
    return std::pair{(1.0 / p.b1) * solve_theta(p.d1, rt).theta, v};
}

}  // namespace

SandwichReport run_sandwich(const LeslieGowerParams& p, const ScalarField& u0, const ScalarField& v0, double T,
                            const StepSchedule& schedule, double slack, bool throw_on_violation) {
    validate(p);
    const Grid& g = p.r1.grid();
    require_same_grid(g, u0.grid(), "run_sandwich");
    require_same_grid(g, v0.grid(), "run_sandwich");
    const SandwichConstants c = sandwich_constants(p);

    std::vector<double> U(u0.values()), V(v0.values()), U1(U), V1(V), U2(U), V2(V);
    PairMarcher full(g, p.d1, p.d2, p.r1, p.r2), low(g, p.d1, p.d2, p.r1, p.r2), high(g, p.d1, p.d2, p.r1, p.r2);
    auto loss_full = mlg_loss(p);
    auto loss_j = [&](double gamma, double eta) {
        return [=, &p](std::size_t, double Uj, double Vj, double& lu, double& lv) {
            lu = p.b1 * Uj + gamma * Vj;
            lv = eta * Vj;
        };
    };
    auto loss1 = loss_j(c.gamma11, c.eta11);
    auto loss2 = loss_j(c.gamma12, c.eta12);

    SandwichReport r{true, 0.0, -1.0, u0, v0, u0, v0, u0, v0, {}, {}};
    for_each_step(schedule, T, [&](double t, double dt) {
        full.step(U, V, dt, loss_full);
        low.step(U1, V1, dt, loss1);
        high.step(U2, V2, dt, loss2);
        double worst = 0.0;
        for (std::size_t i = 0; i < U.size(); ++i)
            worst = std::max({worst, U1[i] - U[i], U[i] - U2[i], V1[i] - V[i], V[i] - V2[i]});
        r.max_violation = std::max(r.max_violation, worst);
        if (worst > slack && r.ordering_ok) {
            r.ordering_ok = false;
            r.first_violation_time = t + dt;
            if (throw_on_violation)
                throw SolverError("comparison ordering violated at t = " + std::to_string(t + dt), worst);
        }
        return true;
    });
    r.U = ScalarField(g, U);
    r.V = ScalarField(g, V);
    r.U11 = ScalarField(g, U1);
    r.V11 = ScalarField(g, V1);
    r.U12 = ScalarField(g, U2);
    r.V12 = ScalarField(g, V2);

    const auto th2 = solve_theta(p.d2, p.r2);
    r.limits[0] = comparison_limit(p, th2, c.gamma11, c.eta11);
    r.limits[1] = comparison_limit(p, th2, c.gamma12, c.eta12);
    r.limit_distance[0] = std::max(distance_inf(r.U11, r.limits[0]->first), distance_inf(r.V11, r.limits[0]->second));
    r.limit_distance[1] = std::max(distance_inf(r.U12, r.limits[1]->first), distance_inf(r.V12, r.limits[1]->second));
    return r;
}

double persistence_delta(const LeslieGowerParams& p) {
    const SandwichConstants c = sandwich_constants(p);
    const auto th2 = solve_theta(p.d2, p.r2);
    const ScalarField rt = p.r1 - (c.gamma11 / c.eta11) * th2.theta;
    const auto th1 = solve_theta(p.d1, rt);
    return 0.5 * std::min(inf_field(th1.theta) / p.b1, inf_field(th2.theta) / c.eta11);
}

PersistenceReport persistence_floor(const LeslieGowerParams& p, int runs, double T, std::uint64_t seed,
                                    unsigned threads) {
    validate(p);
    if (runs < 1) throw PreconditionError("persistence_floor needs at least one run");
    PersistenceReport rep;
    rep.delta = persistence_delta(p);
    const Grid& g = p.r1.grid();
    const InvariantRegion a = invariant_region(p);

    // Initial data drawn up front so results do not depend on thread scheduling.
    Rng rng(seed);
    std::uniform_real_distribution<double> frac(0.2, 1.0);
    std::vector<std::pair<ScalarField, ScalarField>> starts;
    for (int k = 0; k < runs; ++k) {
        ScalarField u0 = random_positive_field(g, rng, 0.0, frac(rng) * a.u_cap);
        ScalarField v0 = random_positive_field(g, rng, 0.0, frac(rng) * a.v_cap);
        starts.emplace_back(u0, v0);
    }
    rep.rows.resize(runs);
    parallel_for(runs, threads, [&](std::size_t k) {
        MlgOptions o;
        const auto tr = simulate_mlg(p, starts[k].first, starts[k].second, T, o);
        double fu = INFINITY, fv = INFINITY;
        for (const auto& row : tr.rows)
            if (row.extrema.t >= 0.9 * T) {
                fu = std::min(fu, row.extrema.u_min);
                fv = std::min(fv, row.extrema.v_min);
            }
        rep.rows[k] = PersistenceRow{static_cast<int>(k), fu, fv, rep.delta};
    });
    for (const auto& r : rep.rows) rep.ok = rep.ok && r.floor_u >= rep.delta && r.floor_v >= rep.delta;
    return rep;
}

double mlg_residual(const LeslieGowerParams& p, const SplitField& u, const SplitField& v) {
    const ScalarField lu = neumann_laplacian_apply(u.deviation);
    const ScalarField lv = neumann_laplacian_apply(v.deviation);
    double r = 0.0;
    for (std::size_t i = 0; i < lu.size(); ++i) {
        const double U = u.offset + u.deviation[i];
        const double V = v.offset + v.deviation[i];
        r = std::max(r, std::abs(p.d1 * lu[i] + U * (p.r1[i] - p.b1 * U - p.a1 * V / (U + p.k1))));
        r = std::max(r, std::abs(p.d2 * lv[i] + V * (p.r2[i] - p.a2 * V / (U + p.k2))));
    }
    return r;
}

CoexistencePair coexistence_pair(const LeslieGowerParams& p, int gas_runs, double gas_T, std::uint64_t seed) {
    validate(p);
    if (p.k1 != p.k2) throw PreconditionError("coexistence_pair requires k1 = k2");
    const Grid& g = p.r1.grid();
    const auto th2 = solve_theta(p.d2, p.r2);
    const ScalarField rt = p.r1 - (p.a1 / p.a2) * th2.theta;
    if (!(mu1(p.d1, rt).eigenvalue < -1e-12 * (1.0 + norm_inf(rt))))
        throw PreconditionError("no coexistence under given params: the prey limit problem has no positive state");
    const auto th1 = solve_theta(p.d1, rt);
    const SplitField U = scaled(th1.split, 1.0 / p.b1);
    const ScalarField Uc = U.combined();

    const ScalarField q = Uc.map([&](double u) { return p.a2 / (u + p.k2); });
    const ScalarField balance = (p.r2 * (Uc + p.k2)).map([&](double x) { return x / p.a2; });
    const auto vs = solve_logistic(p.d2, p.r2, q);

    CoexistencePair out{U, vs.split, inf_field(balance), sup_field(balance), 0.0, false, {}};
    out.residual = mlg_residual(p, U, vs.split);
    out.residual_ok = out.residual <= 1e-8;
    const double lower = out.w_lower > 0.0 ? out.w_lower : 1e-6 * out.w_upper;
    if (inf_field(vs.theta) < lower * (1.0 - 1e-9) || sup_field(vs.theta) > out.w_upper * (1.0 + 1e-9))
        throw SolverError("v* escaped its upper/lower solution bracket");

    if (gas_runs > 0) {
        const InvariantRegion a = invariant_region(p);
        Rng rng(seed);
        std::uniform_real_distribution<double> frac(0.1, 1.0);
        for (int k = 0; k < gas_runs; ++k) {
            const ScalarField u0 = random_positive_field(g, rng, 0.05 * a.u_cap, frac(rng) * a.u_cap);
            const ScalarField v0 = random_positive_field(g, rng, 0.05 * a.v_cap, frac(rng) * a.v_cap);
            MlgOptions o;
            o.record_every = 1000000;
            const auto tr = simulate_mlg(p, u0, v0, gas_T, o);
            out.gas_distances.push_back(std::max(distance_inf(tr.U, Uc), distance_inf(tr.V, vs.theta)));
        }
    }
    return out;
}

std::vector<ExploreRun> explore(const LeslieGowerParams& p, int runs, double T, std::uint64_t seed) {
    validate(p);
    const Grid& g = p.r1.grid();
    const InvariantRegion a = invariant_region(p);
    Rng rng(seed);
    std::uniform_real_distribution<double> frac(0.1, 1.0);
    std::vector<ExploreRun> out;
    std::optional<std::pair<ScalarField, ScalarField>> first;
    for (int k = 0; k < runs; ++k) {
        const ScalarField u0 = random_positive_field(g, rng, 0.0, frac(rng) * a.u_cap);
        const ScalarField v0 = random_positive_field(g, rng, 0.0, frac(rng) * a.v_cap);
        MlgOptions o;
        o.record_every = 1000000;
        const auto tr = simulate_mlg(p, u0, v0, T, o);
        if (!first) first = std::pair{tr.U, tr.V};
        out.push_back(ExploreRun{k, inf_field(tr.U), sup_field(tr.U), inf_field(tr.V), sup_field(tr.V),
                                 std::max(distance_inf(tr.U, first->first), distance_inf(tr.V, first->second))});
    }
    return out;
}

}  // namespace lvdiff
