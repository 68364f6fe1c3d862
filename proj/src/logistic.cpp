#include "lvdiff/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "lvdiff/errors.hpp"
#include "lvdiff/spectral.hpp"

namespace lvdiff {

const char* to_string(Existence e) {
    return e == Existence::unique_positive ? "unique_positive" : "extinction";
}

const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::monotone_iteration: return "monotone_iteration";
        case SolveMethod::newton: return "newton";
        case SolveMethod::time_march: return "time_march";
    }
    return "?";
}

ExistenceVerdict classify_existence(double d, const ScalarField& h) {
    if (!(d > 0.0)) throw PreconditionError("classify_existence requires d > 0");
    if (is_constant(h)) throw PreconditionError("classify_existence requires a non-constant weight");
    const WeightClass c = classify_weight(h);
    ExistenceVerdict v;
    if (sup_field(h) <= 1e-12 * norm_inf(h)) {
        v.existence = Existence::extinction;
        v.threshold_d = 0.0;
        v.reason = "weight is non-positive everywhere";
        return v;
    }
    if (c.integral_sign != IntegralSign::negative) {
        v.existence = Existence::unique_positive;
        v.threshold_d = std::numeric_limits<double>::infinity();
        v.reason = "weight has non-negative integral";
        return v;
    }
    const auto& l = std::get<SpectralResult>(lambda1(h));
    v.threshold_d = 1.0 / l.eigenvalue;
    v.degenerate = std::abs(d - v.threshold_d) <= 1e-8 * v.threshold_d;
    v.existence = (d < v.threshold_d && !v.degenerate) ? Existence::unique_positive : Existence::extinction;
    v.reason = v.degenerate ? "d at the threshold 1/lambda1(h)" : "d compared with 1/lambda1(h)";
    return v;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

Vec vec_of(const ScalarField& f) { return Eigen::Map<const Vec>(f.values().data(), f.size()); }
ScalarField field_of(const Grid& g, const Vec& v) { return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size())); }

struct Problem {
    Grid grid;
    double d;
    Vec h, q, w;
    SpMat K;

    Vec residual(double c, const Vec& dev) const {
        std::vector<double> lap(dev.size());
        neumann_laplacian_apply(grid, std::span<const double>(dev.data(), dev.size()), lap);
        Vec F(dev.size());
        for (Eigen::Index i = 0; i < dev.size(); ++i) {
            const double th = c + dev[i];
            F[i] = d * lap[i] + th * (h[i] - q[i] * th);
        }
        return F;
    }
};

// Classic monotone scheme (d K + m W) u+ = W (u (h - q u) + m u), decreasing
// from an upper solution when m >= max(2 q u - h).
struct MonotoneSweeper {
    const Problem& p;
    double m;
    Eigen::SimplicialLDLT<SpMat> ldlt;

    MonotoneSweeper(const Problem& prob, double shift) : p(prob), m(shift) {
        SpMat A = p.d * p.K;
        for (int k = 0; k < A.rows(); ++k) A.coeffRef(k, k) += m * p.w[k];
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success) throw SolverError("monotone iteration factorization failed");
    }

    Vec sweep(const Vec& u) const {
        Vec rhs = (p.w.array() * (u.array() * (p.h.array() - p.q.array() * u.array()) + m * u.array())).matrix();
        return ldlt.solve(rhs);
    }
};

struct NewtonOutcome {
    double offset;
    Vec dev;
    double residual;
    int iterations;
    bool ok;
};

// Moves the mean of the deviation into the offset. Rounding in the offset is a
// constant shift and is invisible to the Laplacian.
void recenter(const Problem& p, double& c, Vec& dev) {
    const double m = (p.w.array() * dev.array()).sum() / p.w.sum();
    c += m;
    dev.array() -= m;
}

NewtonOutcome newton(const Problem& p, double c, Vec dev, double target, int max_iter) {
    recenter(p, c, dev);
    Vec F = p.residual(c, dev);
    double res = F.cwiseAbs().maxCoeff();
    int stalls = 0;
    int it = 0;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analyzed = false;
    for (; it < max_iter && res > target; ++it) {
        SpMat J = p.d * p.K;
        for (int k = 0; k < J.rows(); ++k) J.coeffRef(k, k) += p.w[k] * (2.0 * p.q[k] * (c + dev[k]) - p.h[k]);
        if (!analyzed) {
            ldlt.analyzePattern(J);
            analyzed = true;
        }
        ldlt.factorize(J);
        if (ldlt.info() != Eigen::Success) return {c, dev, res, it, false};
        const Vec delta = ldlt.solve((p.w.array() * F.array()).matrix());
        if (!delta.allFinite()) return {c, dev, res, it, false};

        double step = 1.0;
        bool accepted = false;
        for (int tries = 0; tries < 12; ++tries, step *= 0.5) {
            const Vec trial = dev + step * delta;
            if (((trial.array() + c) <= 0.0).any()) continue;
            const Vec Ft = p.residual(c, trial);
            const double rt = Ft.cwiseAbs().maxCoeff();
            if (rt < res || (step == 1.0 && rt <= 2.0 * res && res < 1e3 * target)) {
                stalls = rt < 0.5 * res ? 0 : stalls + 1;
                dev = trial;
                recenter(p, c, dev);
                F = p.residual(c, dev);
                res = F.cwiseAbs().maxCoeff();
                accepted = true;
                break;
            }
        }
        if (!accepted || stalls >= 3) break;
    }
    return {c, dev, res, it, res <= target};
}

LogisticSteadyState solve_impl(double d, const ScalarField& h, const ScalarField& q, const LogisticOptions& opts) {
    if (!(d > 0.0)) throw PreconditionError("logistic solve requires d > 0");
    require_same_grid(h.grid(), q.grid(), "solve_logistic");
    if (!(inf_field(q) > 0.0)) throw PreconditionError("crowding coefficient must be positive");
    const Grid& g = h.grid();

    // A positive state exists iff the trivial state is unstable.
    const double hscale = 1.0 + norm_inf(h);
    const double mu = mu1(d, h).eigenvalue;
    if (!(mu < -1e-12 * hscale))
        throw PreconditionError("no positive steady state (extinction): mu1(d,h) = " + std::to_string(mu));

    Problem p{g, d, vec_of(h), vec_of(q), Vec(), stiffness_matrix(g)};
    const auto qw = quadrature_weights(g);
    p.w = Eigen::Map<const Vec>(qw.weights.data(), qw.weights.size());

    const Vec hplus = p.h.cwiseMax(0.0);
    const double upper = (hplus.array() / p.q.array()).maxCoeff() + 1.0;
    const double m = std::max(0.0, (2.0 * p.q.array() * upper - p.h.array()).maxCoeff()) + 1.0;
    MonotoneSweeper sweeper(p, m);

    Vec u = Vec::Constant(g.size(), upper);
    for (int k = 0; k < opts.monotone_sweeps; ++k) u = sweeper.sweep(u);

    const double target = std::min(opts.residual_tol, 1e-13 * hscale * hscale);
    double c = (p.w.array() * u.array()).sum() / g.measure();
    NewtonOutcome out = newton(p, c, (u.array() - c).matrix(), target, opts.newton_max);
    SolveMethod method = SolveMethod::newton;
    int iterations = opts.monotone_sweeps + out.iterations;

    if (!(out.residual <= opts.residual_tol) || !((out.dev.array() + out.offset) > 0.0).all()) {
        // Newton failed: continue the monotone sweeps from the upper solution.
        Vec v = Vec::Constant(g.size(), upper);
        double res = std::numeric_limits<double>::infinity();
        int k = 0;
        for (; k < opts.monotone_max; ++k) {
            v = sweeper.sweep(v);
            if (k % 50 == 0) {
                const double cc = (p.w.array() * v.array()).sum() / g.measure();
                res = p.residual(cc, (v.array() - cc).matrix()).cwiseAbs().maxCoeff();
                if (res <= opts.residual_tol) break;
            }
        }
        c = (p.w.array() * v.array()).sum() / g.measure();
        out = {c, (v.array() - c).matrix(), res, k, res <= opts.residual_tol};
        method = SolveMethod::monotone_iteration;
        iterations = k;
        if (!out.ok) throw SolverError("logistic solve did not reach the residual tolerance", res);
    }

    SplitField split{out.offset, field_of(g, out.dev)};
    ScalarField theta = split.combined();
    if (!(inf_field(theta) > 0.0)) throw SolverError("logistic solve produced a non-positive state", out.residual);

    LogisticSteadyState s{theta, split, d, h, Existence::unique_positive, out.residual, method, iterations,
                          is_constant(h), std::nullopt};

    if (opts.cross_validate) {
        MarchOptions mo;
        mo.schedule = opts.schedule;
        mo.record_every = 1000000;
        // Crowding enters through the loss term; march_logistic covers q = 1 only.
        const ScalarField u0 = ScalarField::constant(g, upper);
        if (is_constant(q) && q[0] == 1.0) {
            const auto traj = march_logistic(d, h, u0, opts.cross_validate_T, mo);
            s.cross_check_distance = distance_inf(traj.final_state, theta);
        } else {
            DiffusionStepper stepper(g, d);
            std::vector<double> cur(u0.values()), nxt(g.size()), gain(g.size()), loss(g.size());
            for_each_step(opts.schedule, opts.cross_validate_T, [&](double, double dt) {
                for (std::size_t i = 0; i < cur.size(); ++i) {
                    gain[i] = std::max(h[i], 0.0);
                    loss[i] = std::max(-h[i], 0.0) + q[i] * cur[i];
                }
                stepper.step(cur, gain, loss, dt, nxt);
                cur.swap(nxt);
                return true;
            });
            s.cross_check_distance = distance_inf(ScalarField(g, cur), theta);
        }
    }
    return s;
}

}  // namespace

LogisticSteadyState solve_theta(double d, const ScalarField& h, const LogisticOptions& opts) {
    return solve_impl(d, h, ScalarField::constant(h.grid(), 1.0), opts);
}

LogisticSteadyState solve_logistic(double d, const ScalarField& h, const ScalarField& q, const LogisticOptions& opts) {
    return solve_impl(d, h, q, opts);
}

double logistic_residual(double d, const ScalarField& h, const ScalarField& q, const SplitField& theta) {
    require_same_grid(h.grid(), theta.deviation.grid(), "logistic_residual");
    require_same_grid(h.grid(), q.grid(), "logistic_residual");
    const ScalarField lap = neumann_laplacian_apply(theta.deviation);
    double r = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double th = theta.offset + theta.deviation[i];
        r = std::max(r, std::abs(d * lap[i] + th * (h[i] - q[i] * th)));
    }
    return r;
}

double logistic_residual(double d, const ScalarField& h, const SplitField& theta) {
    return logistic_residual(d, h, ScalarField::constant(h.grid(), 1.0), theta);
}

LogisticTrajectory march_logistic(double d, const ScalarField& h, const ScalarField& u0, double T,
                                  const MarchOptions& opts) {
    require_same_grid(h.grid(), u0.grid(), "march_logistic");
    if (inf_field(u0) < 0.0) throw PreconditionError("initial data must be non-negative");
    if (opts.target) require_same_grid(h.grid(), opts.target->grid(), "march_logistic target");
    const Grid& g = h.grid();
    const std::size_t n = g.size();
    const double cap = 10.0 * std::max(std::max(sup_field(h), 0.0) + 1.0, sup_field(u0));

    std::vector<double> gain(n), hminus(n), loss(n), cur(u0.values()), nxt(n);
    for (std::size_t i = 0; i < n; ++i) {
        gain[i] = std::max(h[i], 0.0);
        hminus[i] = std::max(-h[i], 0.0);
    }
    const auto qw = quadrature_weights(g);
    auto row = [&](double t) {
        TrajectoryRow r;
        r.t = t;
        r.min_u = *std::min_element(cur.begin(), cur.end());
        r.max_u = *std::max_element(cur.begin(), cur.end());
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += qw.weights[i] * cur[i];
        r.mean_u = s / g.measure();
        r.distance_to_target = std::numeric_limits<double>::quiet_NaN();
        if (opts.target) {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(cur[i] - (*opts.target)[i]));
            r.distance_to_target = m;
        }
        return r;
    };

    LogisticTrajectory traj{{}, u0, 0};
    traj.rows.push_back(row(0.0));
    DiffusionStepper stepper(g, d);
    double t_end = 0.0;
    traj.steps = for_each_step(opts.schedule, T, [&](double t, double dt) {
        for (std::size_t i = 0; i < n; ++i) loss[i] = hminus[i] + cur[i];
        stepper.step(cur, gain, loss, dt, nxt);
        cur.swap(nxt);
        double mx = 0.0;
        for (double v : cur) {
            if (!std::isfinite(v)) throw SolverError("non-finite value in logistic march");
            mx = std::max(mx, v);
        }
        if (mx > cap) throw SolverError("logistic march blow-up detected", mx);
        t_end = t + dt;
        ++traj.steps;
        if (traj.steps % opts.record_every == 0) traj.rows.push_back(row(t_end));
        return true;
    });
    if (traj.rows.back().t != t_end) traj.rows.push_back(row(t_end));
    traj.final_state = ScalarField(g, cur);
    return traj;
}

ThetaLimitsReport theta_limits_check(const ScalarField& h, double small_d, double large_d) {
    if (integrate(h) < -1e-10 * h.grid().measure() * norm_inf(h))
        throw PreconditionError("theta_limits_check requires a non-negative integral");
    ThetaLimitsReport r;
    r.small_d = small_d;
    r.large_d = large_d;
    const Grid& g = h.grid();

    // Sign-change locations: midpoints of edges where h changes sign.
    std::vector<std::array<double, 2>> changes;
    auto consider = [&](std::size_t a, std::size_t b) {
        if ((h[a] > 0.0) != (h[b] > 0.0)) {
            const auto pa = g.coordinate(a), pb = g.coordinate(b);
            changes.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
        }
    };
    for (int j = 0; j < g.points(1); ++j)
        for (int i = 0; i + 1 < g.points(0); ++i) consider(g.node(i, j), g.node(i + 1, j));
    if (g.dim() == 2)
        for (int j = 0; j + 1 < g.points(1); ++j)
            for (int i = 0; i < g.points(0); ++i) consider(g.node(i, j), g.node(i, j + 1));

    const double band = 5.0 * std::sqrt(small_d);
    const auto small = solve_theta(small_d, h);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto p = g.coordinate(k);
        bool excluded = false;
        for (const auto& c : changes)
            if (std::hypot(p[0] - c[0], p[1] - c[1]) <= band) {
                excluded = true;
                break;
            }
        if (excluded) {
            ++r.excluded_nodes;
            continue;
        }
        r.small_d_distance = std::max(r.small_d_distance, std::abs(small.theta[k] - std::max(h[k], 0.0)));
    }
    const auto large = solve_theta(large_d, h);
    r.large_d_distance = distance_inf(large.theta, ScalarField::constant(g, average(h)));
    return r;
}

}  // namespace lvdiff
