#include "lvdiff/competition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lvdiff/config.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/parallel.hpp"
#include "lvdiff/spectral.hpp"

namespace lvdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SplitField scaled(const SplitField& f, double s) { return SplitField{f.offset * s, s * f.deviation}; }

SplitField zero_split(const Grid& g) { return SplitField{0.0, ScalarField::constant(g, 0.0)}; }

double max_ratio(const ScalarField& num, const ScalarField& den) {
    double m = -kInf;
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (den[i] > 0.0) m = std::max(m, num[i] / den[i]);
        else if (num[i] > 0.0) return kInf;
    }
    return m;
}

// Returns (max, argmax) of a unimodal f on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, int iterations) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? std::pair{f1, x1} : std::pair{f2, x2};
}

}  // namespace

void validate(const CompetitionParams& p) {
    for (auto [name, v] : {std::pair{"d1", p.d1}, {"d2", p.d2}, {"b1", p.b1}, {"c1", p.c1}, {"c2", p.c2}})
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("parameter ") + name + " must be positive");
    require_same_grid(p.r1.grid(), p.r2.grid(), "competition parameters");
    require_h1(p.r1, p.r2);
}

AlphaBeta alpha_beta(const ScalarField& r1, const ScalarField& r2, const AlphaBetaOptions& opts) {
    require_same_grid(r1.grid(), r2.grid(), "alpha_beta");
    require_h1(r1, r2);
    if (opts.samples < 2 || !(opts.d2_min > 0.0) || !(opts.d2_max > opts.d2_min))
        throw PreconditionError("alpha_beta: invalid d2 sweep");
    AlphaBeta ab;
    const double lo = std::log10(opts.d2_min), hi = std::log10(opts.d2_max);
    const int n = opts.samples;
    ab.d2_samples.resize(n);
    ab.alpha_samples.resize(n);
    ab.beta_samples.resize(n);
    const double r1bar = average(r1);
    parallel_for(n, opts.threads, [&](std::size_t k) {
        const double d2 = std::pow(10.0, lo + (hi - lo) * static_cast<double>(k) / (n - 1));
        const auto th = solve_theta(d2, r2);
        ab.d2_samples[k] = d2;
        ab.alpha_samples[k] = r1bar / average(th.theta);
        ab.beta_samples[k] = max_ratio(r1, th.theta);
    });

    // d2 -> 0: theta -> r2 (non-negative); d2 -> inf: theta -> average(r2).
    const double r2bar = average(r2);
    const double alpha_limit = r1bar / r2bar;
    const double beta_small = max_ratio(r1, r2);
    const double beta_large = sup_field(r1) / r2bar;

    const auto amin = std::min_element(ab.alpha_samples.begin(), ab.alpha_samples.end()) - ab.alpha_samples.begin();
    const auto bmax = std::max_element(ab.beta_samples.begin(), ab.beta_samples.end()) - ab.beta_samples.begin();
    ab.alpha = ab.alpha_samples[amin];
    ab.alpha_argmin = ab.d2_samples[amin];
    ab.beta = ab.beta_samples[bmax];
    ab.beta_argmax = ab.d2_samples[bmax];

    // Local golden-section refinement between the neighbours of the best sample.
    auto refine = [&](long k, const std::function<double(double)>& f) {
        const double a = std::log10(ab.d2_samples[std::max(0L, k - 1)]);
        const double b = std::log10(ab.d2_samples[std::min<long>(n - 1, k + 1)]);
        return golden_max(f, a, b, 30);
    };
    if (!is_constant(r2)) {
        const auto [na, la] = refine(amin, [&](double l) { return -r1bar / average(solve_theta(std::pow(10.0, l), r2).theta); });
        if (-na < ab.alpha) {
            ab.alpha = -na;
            ab.alpha_argmin = std::pow(10.0, la);
        }
        const auto [vb, lb] = refine(bmax, [&](double l) { return max_ratio(r1, solve_theta(std::pow(10.0, l), r2).theta); });
        if (vb > ab.beta) {
            ab.beta = vb;
            ab.beta_argmax = std::pow(10.0, lb);
        }
    }
    if (alpha_limit < ab.alpha) {
        ab.alpha = alpha_limit;
        ab.alpha_argmin = 0.0;
    }
    if (beta_small > ab.beta) {
        ab.beta = beta_small;
        ab.beta_argmax = 0.0;
    }
    if (beta_large > ab.beta) {
        ab.beta = beta_large;
        ab.beta_argmax = kInf;
    }
    return ab;
}

const char* to_string(Region r) {
    switch (r) {
        case Region::D_plus: return "D_plus";
        case Region::D_zero: return "D_zero";
        case Region::D_minus: return "D_minus";
    }
    return "?";
}

RegionVerdict classify_weight_at(double d1, const ScalarField& r1, const ScalarField& theta2, double ratio) {
    const ScalarField w = r1 - ratio * theta2;
    const double mu = mu1(d1, w).eigenvalue;
    const double tol = 1e-8 * (1.0 + norm_inf(w));
    const Region region = mu > tol ? Region::D_plus : (mu < -tol ? Region::D_minus : Region::D_zero);
    return RegionVerdict{region, mu, w, tol};
}

RegionVerdict classify_point(const CompetitionParams& p) {
    validate(p);
    const auto th = solve_theta(p.d2, p.r2);
    return classify_weight_at(p.d1, p.r1, th.theta, p.c1 / p.c2);
}

IndexSets index_sets(const ScalarField& r1, const ScalarField& theta2, double ratio) {
    const ScalarField w = r1 - ratio * theta2;
    const WeightClass c = classify_weight(w);
    IndexSets s;
    s.integral = c.integral;
    s.sup = sup_field(w);
    const double eps = 1e-12 * norm_inf(w);
    const bool zero = norm_inf(w) <= 1e-10 * std::max(1.0, norm_inf(r1));
    s.in_I = c.integral_sign == IntegralSign::negative && !zero;
    s.in_I1 = s.sup <= eps && !zero;
    s.in_I2 = s.in_I && s.sup > eps;
    return s;
}

IndexSets index_sets(const CompetitionParams& p) {
    return index_sets(p.r1, solve_theta(p.d2, p.r2).theta, p.c1 / p.c2);
}

PhiTilde phi_tilde(const ScalarField& r1, const ScalarField& theta2, double ratio) {
    const IndexSets s = index_sets(r1, theta2, ratio);
    if (s.in_I1) return PhiTilde{0.0, 0.0, true};
    if (!s.in_I2) throw PreconditionError("phi_tilde: d2 is not in the index set I");
    const ScalarField w = r1 - ratio * theta2;
    const auto l = std::get<SpectralResult>(lambda1(w));
    return PhiTilde{1.0 / l.eigenvalue, 1.0 / lambda1_by_bisection(w), false};
}

PhiTilde phi_tilde(const CompetitionParams& p) {
    return phi_tilde(p.r1, solve_theta(p.d2, p.r2).theta, p.c1 / p.c2);
}

const char* to_string(EsCase c) {
    switch (c) {
        case EsCase::E1_r1_constant: return "E1_r1_constant";
        case EsCase::E2_r2_constant: return "E2_r2_constant";
        case EsCase::E3_both_varying: return "E3_both_varying";
        case EsCase::both_constant: return "both_constant";
    }
    return "?";
}

EsDichotomy e_s_dichotomy(double s, const ScalarField& r1, const ScalarField& r2) {
    if (!(s > 0.0)) throw PreconditionError("e_s_dichotomy requires s > 0");
    require_same_grid(r1.grid(), r2.grid(), "e_s_dichotomy");
    EsDichotomy out;
    const bool c1 = is_constant(r1), c2 = is_constant(r2);
    if (c1 && c2) return out;
    if (c1) {
        out.which = EsCase::E1_r1_constant;
        return out;
    }
    if (c2) {
        out.which = EsCase::E2_r2_constant;
        return out;
    }
    out.which = EsCase::E3_both_varying;
    if (!(inf_field(r1) > 0.0)) throw PreconditionError("formula inapplicable: r1 vanishes somewhere in the domain");
    out.candidate = integrate((1.0 / s) * r1 - r2) / log_gradient_energy(r1);
    if (!(out.candidate > 0.0)) {
        out.mismatch = kInf;
        return out;
    }
    const auto th = solve_theta(out.candidate, r2);
    out.mismatch = distance_inf(r1, s * th.theta) / norm_inf(r1);
    if (out.mismatch <= 1e-6) out.d2_star = out.candidate;
    return out;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::degenerate: return "degenerate";
    }
    return "?";
}

LinearStability linear_stability(const CompetitionParams& p, const ScalarField& u, const ScalarField& v) {
    const ScalarField wu = p.r1 - 2.0 * p.b1 * u - p.c1 * v;
    const ScalarField wv = p.r2 - 2.0 * p.c2 * v;
    LinearStability s;
    s.u_block = mu1(p.d1, wu).eigenvalue;
    s.v_block = mu1(p.d2, wv).eigenvalue;
    s.eigenvalue = std::min(s.u_block, s.v_block);
    const double tol = 1e-8 * (1.0 + std::max(norm_inf(wu), norm_inf(wv)));
    s.tag = s.eigenvalue > tol ? Stability::stable : (s.eigenvalue < -tol ? Stability::unstable : Stability::degenerate);
    return s;
}

double competition_residual(const CompetitionParams& p, const SplitField& u, const SplitField& v) {
    const ScalarField lu = neumann_laplacian_apply(u.deviation);
    const ScalarField lv = neumann_laplacian_apply(v.deviation);
    double r = 0.0;
    for (std::size_t i = 0; i < lu.size(); ++i) {
        const double U = u.offset + u.deviation[i];
        const double V = v.offset + v.deviation[i];
        r = std::max(r, std::abs(p.d1 * lu[i] + U * (p.r1[i] - p.b1 * U - p.c1 * V)));
        r = std::max(r, std::abs(p.d2 * lv[i] + V * (p.r2[i] - p.c2 * V)));
    }
    return r;
}

namespace {

SteadyState make_state(const CompetitionParams& p, std::string name, SplitField u, SplitField v) {
    const double res = competition_residual(p, u, v);
    const auto stab = linear_stability(p, u.combined(), v.combined());
    return SteadyState{std::move(name), std::move(u), std::move(v), res, stab};
}

std::optional<SteadyState> coexistence_from(const CompetitionParams& p, const LogisticSteadyState& th2) {
    const ScalarField rt = p.r1 - (p.c1 / p.c2) * th2.theta;
    const double mu = mu1(p.d1, rt).eigenvalue;
    if (!(mu < -1e-12 * (1.0 + norm_inf(rt)))) return std::nullopt;
    const auto th1 = solve_theta(p.d1, rt);
    return make_state(p, "coexistence", scaled(th1.split, 1.0 / p.b1), scaled(th2.split, 1.0 / p.c2));
}

}  // namespace

std::optional<SteadyState> coexistence_state(const CompetitionParams& p) {
    validate(p);
    return coexistence_from(p, solve_theta(p.d2, p.r2));
}

std::vector<const SteadyState*> SteadyStateCatalog::states() const {
    std::vector<const SteadyState*> s{&trivial, &semi_trivial_u, &semi_trivial_v};
    if (coexistence) s.push_back(&*coexistence);
    return s;
}

SteadyStateCatalog steady_state_catalog(const CompetitionParams& p) {
    validate(p);
    const Grid& g = p.r1.grid();
    const auto th1 = solve_theta(p.d1, p.r1);
    const auto th2 = solve_theta(p.d2, p.r2);
    return SteadyStateCatalog{
        make_state(p, "trivial", zero_split(g), zero_split(g)),
        make_state(p, "semi_trivial_u", scaled(th1.split, 1.0 / p.b1), zero_split(g)),
        make_state(p, "semi_trivial_v", zero_split(g), scaled(th2.split, 1.0 / p.c2)),
        coexistence_from(p, th2),
    };
}

Identification identify_attractor(const SteadyStateCatalog& catalog, const ScalarField& U, const ScalarField& V,
                                  double margin) {
    std::vector<std::pair<double, std::string>> d;
    for (const SteadyState* s : catalog.states())
        d.emplace_back(std::max(distance_inf(U, s->u.combined()), distance_inf(V, s->v.combined())), s->name);
    std::sort(d.begin(), d.end());
    Identification id{"undetermined", d[0].first, d.size() > 1 ? d[1].first : kInf};
    if (id.runner_up >= margin * id.distance) id.name = d[0].second;
    return id;
}

CompetitionTrajectory simulate_competition(const CompetitionParams& p, const ScalarField& u0, const ScalarField& v0,
                                           double T, const SteadyStateCatalog& catalog,
                                           const SimulationOptions& opts) {
    validate(p);
    const Grid& g = p.r1.grid();
    require_same_grid(g, u0.grid(), "simulate_competition");
    require_same_grid(g, v0.grid(), "simulate_competition");
    if (inf_field(u0) < 0.0 || inf_field(v0) < 0.0) throw PreconditionError("initial data must be non-negative");
    const std::size_t n = g.size();

    const ScalarField w0 = p.c2 * v0;
    std::vector<double> U(u0.values()), W(w0.values()), Un(n), Wn(n);
    std::vector<double> gu(p.r1.values()), lu(n), gw(n), hminus(n), lw(n);
    for (std::size_t i = 0; i < n; ++i) {
        gw[i] = std::max(p.r2[i], 0.0);
        hminus[i] = std::max(-p.r2[i], 0.0);
    }
    const double ucap = 10.0 * std::max(sup_field(p.r1) / p.b1 + 1.0, sup_field(u0));
    const double wcap = 10.0 * std::max(sup_field(p.r2) + 1.0, sup_field(w0));

    DiffusionStepper su(g, p.d1), sw(g, p.d2);
    CompetitionTrajectory tr{{}, u0, v0, 0.0, 0, "undetermined", 0.0, 0.0};
    auto record = [&](double t) {
        PairRow r;
        r.t = t;
        r.u_min = *std::min_element(U.begin(), U.end());
        r.u_max = *std::max_element(U.begin(), U.end());
        double vmin = kInf, vmax = -kInf;
        for (double w : W) {
            vmin = std::min(vmin, w / p.c2);
            vmax = std::max(vmax, w / p.c2);
        }
        r.v_min = vmin;
        r.v_max = vmax;
        tr.rows.push_back(r);
    };
    record(0.0);

    auto advance = [&](double horizon) {
        const double t0 = tr.t_end;
        for_each_step(opts.schedule, horizon, [&](double t, double dt) {
            for (std::size_t i = 0; i < n; ++i) {
                lu[i] = p.b1 * U[i] + p.c1 * (W[i] / p.c2);
                lw[i] = hminus[i] + W[i];
            }
            su.step(U, gu, lu, dt, Un);
            sw.step(W, gw, lw, dt, Wn);
            U.swap(Un);
            W.swap(Wn);
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(U[i]) || !std::isfinite(W[i])) throw SolverError("non-finite value in competition run");
                if (U[i] > ucap || W[i] > wcap) throw SolverError("competition run blow-up detected");
            }
            tr.t_end = t0 + t + dt;
            if (++tr.steps % opts.record_every == 0) record(tr.t_end);
            return true;
        });
        if (tr.rows.back().t != tr.t_end) record(tr.t_end);
    };

    auto fields = [&] {
        std::vector<double> V(n);
        for (std::size_t i = 0; i < n; ++i) V[i] = W[i] / p.c2;
        return std::pair{ScalarField(g, U), ScalarField(g, std::move(V))};
    };

    advance(T);
    auto [Uf, Vf] = fields();
    Identification id = identify_attractor(catalog, Uf, Vf, opts.margin);
    while (id.name == "undetermined" && tr.t_end + T <= opts.max_horizon && T > 0.0) {
        advance(T);
        std::tie(Uf, Vf) = fields();
        id = identify_attractor(catalog, Uf, Vf, opts.margin);
    }
    tr.U = Uf;
    tr.V = Vf;
    tr.attractor = id.name;
    tr.attractor_distance = id.distance;
    tr.runner_up_distance = id.runner_up;
    return tr;
}

}  // namespace lvdiff
