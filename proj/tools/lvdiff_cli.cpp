// lvdiff: command-line front end for the spectral, logistic, competition and
// predator-prey tools. Exit codes: 0 ok, 1 verification failure, 2 bad
// configuration, 3 solver failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lvdiff/competition.hpp"
#include "lvdiff/config.hpp"
#include "lvdiff/errors.hpp"
#include "lvdiff/field_io.hpp"
#include "lvdiff/leslie_gower.hpp"
#include "lvdiff/logistic.hpp"
#include "lvdiff/parallel.hpp"
#include "lvdiff/phase_diagram.hpp"
#include "lvdiff/spectral.hpp"
#include "lvdiff/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lvdiff;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<double> tol;
};

struct Run {
    ExperimentConfig cfg;
    Grid grid;
    fs::path out;
};

Run prepare(const Globals& g) {
    ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
    if (g.seed) cfg.seed = *g.seed;
    if (g.grid) {
        cfg.grid.points[0] = *g.grid;
        if (cfg.grid.dim == 2) cfg.grid.points[1] = *g.grid;
    }
    if (g.tol) {
        if (!(*g.tol > 0.0)) throw ConfigError("--tol must be positive");
        cfg.tolerances["residual"] = *g.tol;
    }
    if (!g.out.empty()) cfg.output_dir = g.out;
    Run r{cfg, cfg.grid.make(), fs::path(cfg.output_dir)};
    fs::create_directories(r.out);
    std::ofstream(r.out / "run.json") << cfg.to_json().dump(2) << '\n';
    return r;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

std::ofstream open_table(const fs::path& p, std::uint64_t seed) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    os << "# seed " << seed << '\n';
    os.precision(17);
    return os;
}

LogisticOptions logistic_options(const ExperimentConfig& cfg) {
    LogisticOptions o;
    o.residual_tol = cfg.tolerance_or("residual", o.residual_tol);
    return o;
}

ScalarField rate_or_constant(const Run& r, const char* key, double c) {
    return r.cfg.has_rate(key) ? r.cfg.rate(key, r.grid) : ScalarField::constant(r.grid, c);
}

CompetitionParams competition_params(const Run& r) {
    const auto& c = r.cfg;
    CompetitionParams p{c.param("d1"), c.param("d2"), c.param_or("b1", 1.0), c.param("c1"), c.param_or("c2", 1.0),
                        c.rate("r1", r.grid), c.rate("r2", r.grid)};
    validate(p);
    return p;
}

LeslieGowerParams lg_params(const Run& r) {
    const auto& c = r.cfg;
    LeslieGowerParams p{c.param("d1"), c.param("d2"), c.param_or("b1", 1.0), c.param("a1"), c.param("a2"),
                        c.param("k1"), c.param("k2"), c.rate("r1", r.grid), c.rate("r2", r.grid)};
    validate(p);
    return p;
}

json spectral_json(const SpectralResult& s) {
    return {{"eigenvalue", s.eigenvalue}, {"residual", s.residual}, {"iterations", s.iterations}, {"method", s.method}};
}

int cmd_eigen(const Globals& g) {
    const Run r = prepare(g);
    const ScalarField h = r.cfg.rate("h", r.grid);
    const double d = r.cfg.param_or("d", 1.0);
    const WeightClass wc = classify_weight(h);
    json out = {{"seed", r.cfg.seed},
                {"weight", {{"integral", wc.integral}, {"integral_sign", to_string(wc.integral_sign)},
                            {"changes_sign", wc.changes_sign}, {"identically_zero", wc.identically_zero}}}};
    const SpectralResult m = mu1(d, h);
    out["mu1"] = spectral_json(m);
    out["mu1"]["d"] = d;
    out["mu1"]["eigenfunction"] = "mu1_eigenfunction.csv";
    write_field_csv((r.out / "mu1_eigenfunction.csv").string(), m.eigenfunction);
    if (wc.changes_sign) {
        const Lambda1Result l = lambda1(h);
        if (const auto* s = std::get_if<SpectralResult>(&l)) {
            out["lambda1"] = spectral_json(*s);
            out["lambda1"]["eigenfunction"] = "lambda1_eigenfunction.csv";
            write_field_csv((r.out / "lambda1_eigenfunction.csv").string(), s->eigenfunction);
            if (wc.integral_sign == IntegralSign::negative) out["lambda1"]["bisection"] = lambda1_by_bisection(h);
        } else {
            out["lambda1"] = {{"no_nonzero_principal", true}, {"integral", std::get<NoNonzeroPrincipal>(l).integral}};
        }
    }
    write_json(r.out / "eigen.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_theta(const Globals& g) {
    const Run r = prepare(g);
    const ScalarField h = r.cfg.rate("h", r.grid);
    const double d = r.cfg.param("d");
    const ExistenceVerdict ev = classify_existence(d, h);
    json out = {{"seed", r.cfg.seed},
                {"d", d},
                {"existence", to_string(ev.existence)},
                {"threshold_d", std::isfinite(ev.threshold_d) ? json(ev.threshold_d) : json("inf")},
                {"degenerate", ev.degenerate},
                {"reason", ev.reason}};
    if (ev.existence == Existence::unique_positive) {
        LogisticOptions o = logistic_options(r.cfg);
        o.cross_validate = r.cfg.param_or("cross_validate", 0.0) != 0.0;
        const auto th = solve_theta(d, h, o);
        out["residual"] = th.solver_residual;
        out["method"] = to_string(th.method);
        out["iterations"] = th.iterations;
        out["integral_h"] = integrate(h);
        out["integral_theta"] = integrate(th.theta);
        out["outside_hypothesis"] = th.outside_h2;
        if (th.cross_check_distance) out["time_march_distance"] = *th.cross_check_distance;
        write_field_csv((r.out / "theta.csv").string(), th.theta);
    }
    write_json(r.out / "theta.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

void write_pair_rows(const fs::path& p, std::uint64_t seed, const std::vector<PairRow>& rows) {
    auto os = open_table(p, seed);
    os << "t,u_min,u_max,v_min,v_max\n";
    for (const auto& r : rows) os << r.t << ',' << r.u_min << ',' << r.u_max << ',' << r.v_min << ',' << r.v_max << '\n';
}

int cmd_simulate(const Globals& g) {
    const Run r = prepare(g);
    const double T = r.cfg.horizon;
    json out = {{"seed", r.cfg.seed}, {"model", to_string(r.cfg.model)}, {"T", T}};
    switch (r.cfg.model) {
        case ModelKind::logistic: {
            const ScalarField h = r.cfg.rate("h", r.grid);
            const double d = r.cfg.param("d");
            MarchOptions mo;
            if (classify_existence(d, h).existence == Existence::unique_positive)
                mo.target = solve_theta(d, h, logistic_options(r.cfg)).theta;
            else
                mo.target = ScalarField::constant(r.grid, 0.0);
            const auto tr = march_logistic(d, h, rate_or_constant(r, "u0", 1.0), T, mo);
            auto os = open_table(r.out / "trajectory.csv", r.cfg.seed);
            os << "t,min_u,max_u,mean_u,distance_to_target\n";
            for (const auto& row : tr.rows)
                os << row.t << ',' << row.min_u << ',' << row.max_u << ',' << row.mean_u << ','
                   << row.distance_to_target << '\n';
            write_field_csv((r.out / "final.csv").string(), tr.final_state);
            out["steps"] = tr.steps;
            out["final_distance"] = tr.rows.back().distance_to_target;
            break;
        }
        case ModelKind::competition: {
            const CompetitionParams p = competition_params(r);
            const auto cat = steady_state_catalog(p);
            const auto tr = simulate_competition(p, rate_or_constant(r, "u0", 0.5), rate_or_constant(r, "v0", 0.5), T, cat);
            write_pair_rows(r.out / "trajectory.csv", r.cfg.seed, tr.rows);
            write_field_csv((r.out / "U.csv").string(), tr.U);
            write_field_csv((r.out / "V.csv").string(), tr.V);
            const RegionVerdict v = classify_point(p);
            out.update({{"t_end", tr.t_end},
                        {"steps", tr.steps},
                        {"attractor", tr.attractor},
                        {"attractor_distance", tr.attractor_distance},
                        {"runner_up_distance", tr.runner_up_distance},
                        {"region", to_string(v.region)},
                        {"mu1", v.mu1_value}});
            break;
        }
        case ModelKind::leslie_gower: {
            const LeslieGowerParams p = lg_params(r);
            const InvariantRegion a = invariant_region(p);
            MlgOptions o;
            o.record_every = static_cast<long>(r.cfg.param_or("record_every", 20));
            const auto tr = simulate_mlg(p, rate_or_constant(r, "u0", 0.5 * a.u_cap),
                                         rate_or_constant(r, "v0", 0.5 * a.v_cap), T, o);
            std::vector<PairRow> rows;
            for (const auto& row : tr.rows) rows.push_back(row.extrema);
            write_pair_rows(r.out / "trajectory.csv", r.cfg.seed, rows);
            write_field_csv((r.out / "U.csv").string(), tr.U);
            write_field_csv((r.out / "V.csv").string(), tr.V);
            const auto env = envelope_check(p, tr);
            out.update({{"steps", tr.steps},
                        {"started_inside", tr.started_inside},
                        {"left_region", tr.left_region},
                        {"max_excursion", tr.max_excursion},
                        {"envelope_ok", env.ok},
                        {"worst_u_ratio", env.worst_u_ratio},
                        {"worst_v_ratio", env.worst_v_ratio}});
            const int runs = static_cast<int>(r.cfg.param_or("persistence_runs", 0));
            if (runs > 0) {
                const auto pr = persistence_floor(p, runs, T, r.cfg.seed, default_threads());
                auto os = open_table(r.out / "persistence.csv", r.cfg.seed);
                os << "run,floor_U,floor_V,delta\n";
                for (const auto& row : pr.rows)
                    os << row.run << ',' << row.floor_u << ',' << row.floor_v << ',' << row.delta << '\n';
                out["persistence_ok"] = pr.ok;
                out["delta"] = pr.delta;
            }
            break;
        }
    }
    write_json(r.out / "summary.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_classify(const Globals& g) {
    const Run r = prepare(g);
    json out = {{"seed", r.cfg.seed}};
    if (r.cfg.model == ModelKind::competition) {
        const CompetitionParams p = competition_params(r);
        const AlphaBeta ab = alpha_beta(p.r1, p.r2);
        const RegionVerdict v = classify_point(p);
        const IndexSets s = index_sets(p);
        out.update({{"ratio", p.c1 / p.c2},
                    {"alpha", ab.alpha},
                    {"beta", ab.beta},
                    {"region", to_string(v.region)},
                    {"mu1", v.mu1_value},
                    {"tolerance", v.tolerance},
                    {"in_I", s.in_I},
                    {"in_I1", s.in_I1},
                    {"in_I2", s.in_I2}});
        if (s.in_I) out["phi"] = phi_tilde(p).value;
        const auto cat = steady_state_catalog(p);
        json states = json::array();
        for (const SteadyState* st : cat.states())
            states.push_back({{"name", st->name},
                              {"residual", st->residual},
                              {"stability", to_string(st->stability.tag)},
                              {"eigenvalue", st->stability.eigenvalue}});
        out["steady_states"] = states;
    } else if (r.cfg.model == ModelKind::leslie_gower) {
        out.update(check_conditions(lg_params(r)).to_json());
    } else {
        const ScalarField h = r.cfg.rate("h", r.grid);
        const ExistenceVerdict ev = classify_existence(r.cfg.param("d"), h);
        out.update({{"existence", to_string(ev.existence)}, {"degenerate", ev.degenerate}, {"reason", ev.reason}});
    }
    write_json(r.out / "classify.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_phase(const Globals& g) {
    const Run r = prepare(g);
    if (r.cfg.model != ModelKind::competition) throw ConfigError("phase-diagram needs model \"competition\"");
    CompetitionParams base{1.0, 1.0, r.cfg.param_or("b1", 1.0), r.cfg.param("c1"), r.cfg.param_or("c2", 1.0),
                           r.cfg.rate("r1", r.grid), r.cfg.rate("r2", r.grid)};
    PhaseDiagramOptions o;
    o.d1_values = r.cfg.sweep_d1.values();
    o.d2_values = r.cfg.sweep_d2.values();
    o.simulate = r.cfg.param_or("simulate", 0.0) != 0.0;
    o.T = r.cfg.horizon;
    o.seed = r.cfg.seed;
    o.threads = default_threads();
    const PhaseDiagram pd = phase_diagram(base, o);
    write_phase_diagram(pd, r.out.string(), r.cfg.seed);
    const BoundaryCheck b = boundary_check(pd);
    int failed = 0;
    for (const auto& c : pd.cells) {
        if (!c.error.empty()) {
            ++failed;
            std::cerr << "cell d1=" << c.d1 << " d2=" << c.d2 << ": " << c.error << '\n';
        }
    }
    json out = {{"seed", r.cfg.seed},     {"ratio", pd.ratio},          {"alpha", pd.alpha},
                {"beta", pd.beta},        {"cells", pd.cells.size()},   {"failed_cells", failed},
                {"boundary_ok", b.ok},    {"boundary_mismatches", b.mismatched}};
    write_json(r.out / "phase.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_verify(const Globals& g, const std::vector<std::string>& names) {
    const Run r = prepare(g);
    std::vector<std::string> todo = names;
    if (todo.empty() || (todo.size() == 1 && todo[0] == "all")) todo = suite_names();
    bool pass = true;
    json all = json::array();
    for (const auto& n : todo) {
        const SuiteReport rep = run_suite(n, r.cfg);
        std::cout << rep.summary();
        pass = pass && rep.pass;
        all.push_back(rep.to_json());
    }
    write_json(r.out / "verdicts.json", {{"seed", r.cfg.seed}, {"pass", pass}, {"suites", all}});
    return pass ? 0 : 1;
}

int cmd_explore(const Globals& g) {
    const Run r = prepare(g);
    const LeslieGowerParams p = lg_params(r);
    const auto cond = check_conditions(p);
    if (!(cond.ratio <= cond.alpha && p.k2 > p.k1))
        std::cerr << "note: parameters are outside the open regime (ratio <= alpha, k2 > k1)\n";
    const int runs = static_cast<int>(r.cfg.param_or("runs", 5));
    const auto res = explore(p, runs, r.cfg.horizon, r.cfg.seed);
    auto os = open_table(r.out / "explore.csv", r.cfg.seed);
    os << "run,u_min,u_max,v_min,v_max,distance_to_first\n";
    for (const auto& e : res)
        os << e.run << ',' << e.u_min << ',' << e.u_max << ',' << e.v_min << ',' << e.v_max << ','
           << e.distance_to_first << '\n';
    json out = {{"seed", r.cfg.seed}, {"runs", runs}, {"conditions", cond.to_json()}};
    write_json(r.out / "explore.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral and dynamical checks for heterogeneous reaction-diffusion systems"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--grid", g.grid, "points per axis")->check(CLI::Range(3, 100000));
    app.add_option("--tol", g.tol, "steady-state residual tolerance");

    std::vector<std::string> suites;
    auto* eigen = app.add_subcommand("eigen", "principal eigenvalues mu1(d, h) and lambda1(h)");
    auto* theta = app.add_subcommand("theta", "logistic steady state theta_{d,h}");
    auto* simulate = app.add_subcommand("simulate", "time march of the configured model");
    auto* classify = app.add_subcommand("classify", "region and condition report");
    auto* phase = app.add_subcommand("phase-diagram", "region map over a (d1, d2) sweep");
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("suites", suites, "suite names or 'all'");
    auto* explore_cmd = app.add_subcommand("explore", "log attractors in the open predator-prey regime");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*eigen) return cmd_eigen(g);
        if (*theta) return cmd_theta(g);
        if (*simulate) return cmd_simulate(g);
        if (*classify) return cmd_classify(g);
        if (*phase) return cmd_phase(g);
        if (*verify) return cmd_verify(g, suites);
        if (*explore_cmd) return cmd_explore(g);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
