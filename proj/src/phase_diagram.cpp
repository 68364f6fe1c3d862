#include "lvdiff/phase_diagram.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lvdiff/errors.hpp"
#include "lvdiff/parallel.hpp"
#include "lvdiff/random_fields.hpp"

namespace lvdiff {

namespace {

int region_code(const PhaseCell& c) {
    if (!c.region) return 2;
    switch (*c.region) {
        case Region::D_minus: return -1;
        case Region::D_zero: return 0;
        case Region::D_plus: return 1;
    }
    return 2;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PhaseDiagram phase_diagram(const CompetitionParams& base, const PhaseDiagramOptions& opts) {
    if (opts.d1_values.empty() || opts.d2_values.empty()) throw PreconditionError("phase diagram needs non-empty sweeps");
    validate(base);
    PhaseDiagram pd;
    pd.ratio = base.c1 / base.c2;
    pd.d1 = opts.d1_values;
    pd.d2 = opts.d2_values;
    const AlphaBeta ab = alpha_beta(base.r1, base.r2);
    pd.alpha = ab.alpha;
    pd.beta = ab.beta;

    const std::size_t n1 = pd.d1.size(), n2 = pd.d2.size();
    std::vector<std::optional<ScalarField>> theta(n2);
    pd.columns.resize(n2);
    parallel_for(n2, opts.threads, [&](std::size_t j) {
        PhaseColumn& col = pd.columns[j];
        col.d2 = pd.d2[j];
        try {
            theta[j] = solve_theta(col.d2, base.r2).theta;
            col.sets = index_sets(base.r1, *theta[j], pd.ratio);
            if (col.sets.in_I) col.phi = phi_tilde(base.r1, *theta[j], pd.ratio).value;
        } catch (const std::exception& e) {
            col.error = e.what();
        }
    });

    pd.cells.resize(n1 * n2);
    parallel_for(n1 * n2, opts.threads, [&](std::size_t k) {
        const std::size_t i = k % n1, j = k / n1;
        PhaseCell& c = pd.cells[k];
        c.d1 = pd.d1[i];
        c.d2 = pd.d2[j];
        if (!theta[j]) {
            c.error = pd.columns[j].error;
            return;
        }
        try {
            const RegionVerdict v = classify_weight_at(c.d1, base.r1, *theta[j], pd.ratio);
            c.region = v.region;
            c.mu1 = v.mu1_value;
            if (opts.simulate) {
                CompetitionParams p = base;
                p.d1 = c.d1;
                p.d2 = c.d2;
                const auto cat = steady_state_catalog(p);
                Rng rng(opts.seed + k);
                const Grid& g = p.r1.grid();
                const auto u0 = random_positive_field(g, rng, 0.1, 1.0);
                const auto v0 = random_positive_field(g, rng, 0.1, 1.0);
                c.attractor = simulate_competition(p, u0, v0, opts.T, cat).attractor;
            }
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });
    return pd;
}

BoundaryCheck boundary_check(const PhaseDiagram& pd) {
    BoundaryCheck b;
    const std::size_t n1 = pd.d1.size();
    for (std::size_t j = 0; j < pd.d2.size(); ++j) {
        const PhaseColumn& col = pd.columns[j];
        if (!col.error.empty()) continue;
        // Expected number of cells left of the curve; everything is D_minus outside I.
        std::size_t expected = n1;
        if (col.phi) {
            expected = 0;
            while (expected < n1 && pd.d1[expected] < *col.phi) ++expected;
        }
        std::size_t first_plus = n1;
        bool bad_cell = false;
        for (std::size_t i = 0; i < n1; ++i) {
            const PhaseCell& c = pd.at(i, j);
            if (!c.region) bad_cell = true;
            else if (*c.region == Region::D_plus && first_plus == n1) first_plus = i;
        }
        ++b.columns;
        const auto gap = first_plus > expected ? first_plus - expected : expected - first_plus;
        if (bad_cell || gap > 1) {
            ++b.mismatched;
            b.mismatched_d2.push_back(col.d2);
        }
    }
    b.ok = b.mismatched == 0;
    return b;
}

void write_phase_diagram(const PhaseDiagram& pd, const std::string& dir, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    auto open = [&](const char* name) {
        std::ofstream os(d / name);
        if (!os) throw ConfigError("cannot write " + (d / name).string());
        return os;
    };
    {
        auto os = open("phase.csv");
        os << "# seed " << seed << " ratio " << fmt(pd.ratio) << " alpha " << fmt(pd.alpha) << " beta "
           << fmt(pd.beta) << "\n";
        os << "d1,d2,region,mu1,attractor\n";
        for (const auto& c : pd.cells)
            os << fmt(c.d1) << ',' << fmt(c.d2) << ',' << (c.region ? to_string(*c.region) : "error") << ','
               << (c.region ? fmt(c.mu1) : "nan") << ',' << (c.error.empty() ? c.attractor : "error") << '\n';
    }
    {
        auto os = open("regions.dat");
        os << pd.d1.size();
        for (double x : pd.d1) os << ' ' << fmt(x);
        os << '\n';
        for (std::size_t j = 0; j < pd.d2.size(); ++j) {
            os << fmt(pd.d2[j]);
            for (std::size_t i = 0; i < pd.d1.size(); ++i) os << ' ' << region_code(pd.at(i, j));
            os << '\n';
        }
    }
    {
        auto os = open("phi.csv");
        os << "# seed " << seed << "\n";
        os << "d2,phi,set\n";
        for (const auto& col : pd.columns) {
            const char* set = col.sets.in_I1 ? "I1" : col.sets.in_I2 ? "I2" : "none";
            os << fmt(col.d2) << ',' << (col.phi ? fmt(*col.phi) : "nan") << ',' << (col.error.empty() ? set : "error")
               << '\n';
        }
    }
    {
        auto os = open("phase.gp");
        os << "set logscale xy\n"
              "set xlabel 'd1'\nset ylabel 'd2'\n"
              "set cbrange [-1:1]\nset palette defined (-1 'steelblue', 0 'white', 1 'firebrick')\n"
              "set datafile separator whitespace\n"
              "plot 'regions.dat' nonuniform matrix with image notitle, \\\n"
              "     '< grep -v nan phi.csv | tail -n +3 | tr , \" \"' using 2:1 with linespoints lc 'black' title 'phi'\n";
    }
}

}  // namespace lvdiff
