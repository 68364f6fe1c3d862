#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lvdiff/competition.hpp"

namespace lvdiff {

struct PhaseDiagramOptions {
    std::vector<double> d1_values;
    std::vector<double> d2_values;
    /// Also simulate every cell and record the identified attractor.
    bool simulate = false;
    double T = 2000.0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct PhaseCell {
    double d1 = 0.0, d2 = 0.0;
    std::optional<Region> region;
    double mu1 = 0.0;
    std::string attractor = "not_simulated";
    std::string error;  // non-empty when the cell failed
};

/// Per-d2 data shared by a column of cells, including the independently computed boundary curve.
struct PhaseColumn {
    double d2 = 0.0;
    IndexSets sets;
    std::optional<double> phi;
    std::string error;
};

struct PhaseDiagram {
    double ratio = 0.0;
    double alpha = 0.0, beta = 0.0;
    std::vector<double> d1;
    std::vector<double> d2;
    std::vector<PhaseColumn> columns;
    std::vector<PhaseCell> cells;  // d1 fastest

    const PhaseCell& at(std::size_t i, std::size_t j) const { return cells[j * d1.size() + i]; }
};

/// Classifies every (d1, d2) cell for ratio c1/c2 of `base`; d1/d2 of `base` are ignored.
/// Cell failures are recorded and the sweep continues.
PhaseDiagram phase_diagram(const CompetitionParams& base, const PhaseDiagramOptions& opts);

struct BoundaryCheck {
    int columns = 0;
    int mismatched = 0;
    std::vector<double> mismatched_d2;
    bool ok = true;
};

/// Per column the D+ cells must start within one cell of where the boundary curve crosses the d1 axis.
BoundaryCheck boundary_check(const PhaseDiagram& pd);

/// phase.csv (d1, d2, region, mu1, attractor), regions.dat (gnuplot nonuniform matrix,
/// -1 / 0 / 1 for D_minus / D_zero / D_plus), phi.csv overlay and phase.gp.
void write_phase_diagram(const PhaseDiagram& pd, const std::string& dir, std::uint64_t seed);

}  // namespace lvdiff
