#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/SparseCholesky>

#include "lvdiff/grid.hpp"

namespace lvdiff {

/// Deterministic step-size ramp: dt_k = min(dt_max, dt_initial * growth^k).
/// The sequence depends only on the step index, never on the state, so two
/// runs with the same schedule visit the same times.
struct StepSchedule {
    double dt_initial = 1e-3;
    double dt_max = 0.05;
    double growth = 1.05;

    double dt(long step) const;
};

/// Calls fn(t, dt) for consecutive steps covering [0, T]; the last step is
/// shortened to land on T. Stops early when fn returns false.
long for_each_step(const StepSchedule& schedule, double T, const std::function<bool(double, double)>& fn);

/// Linearly implicit step for u_t = d Lap u + u (gain - loss) with gain, loss >= 0
/// evaluated at the old state:
///   (1 + dt loss) u+ - dt d Lap u+ = u (1 + dt gain).
/// Implicit diffusion with a Patankar-type reaction split: positivity is
/// unconditional and a fixed point of the step is exactly a discrete steady
/// state.
class DiffusionStepper {
public:
    DiffusionStepper(const Grid& grid, double d);

    void step(std::span<const double> u, std::span<const double> gain, std::span<const double> loss, double dt,
              std::span<double> out);

    const Grid& grid() const noexcept { return grid_; }
    double diffusion() const noexcept { return d_; }

private:
    Grid grid_;
    double d_;
    std::vector<double> w_;
    // 1D: edge coefficients for the tridiagonal solve.
    std::vector<double> kappa_;
    std::vector<double> c_, r_;
    // 2D: assembled stiffness and a reused factorization.
    Eigen::SparseMatrix<double> K_;
    Eigen::SparseMatrix<double> A_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool analyzed_ = false;
};

}  // namespace lvdiff

namespace lvdiff {

/// Per-record extrema of a two-component run.
struct PairRow {
    double t = 0.0;
    double u_min = 0.0, u_max = 0.0;
    double v_min = 0.0, v_max = 0.0;
};

}  // namespace lvdiff
