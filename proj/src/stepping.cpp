#include "lvdiff/stepping.hpp"

#include <algorithm>
#include <cmath>

#include "lvdiff/errors.hpp"

namespace lvdiff {

double StepSchedule::dt(long step) const {
    if (!(dt_initial > 0.0) || !(dt_max >= dt_initial) || !(growth >= 1.0))
        throw PreconditionError("invalid step schedule");
    const double ramp = dt_initial * std::pow(growth, static_cast<double>(step));
    return std::min(dt_max, ramp);
}

long for_each_step(const StepSchedule& schedule, double T, const std::function<bool(double, double)>& fn) {
    if (!(T >= 0.0)) throw PreconditionError("negative time horizon");
    double t = 0.0;
    long k = 0;
    while (t < T) {
        double dt = schedule.dt(k);
        // Avoid a sliver final step.
        if (t + 1.5 * dt >= T) dt = T - t;
        if (!fn(t, dt)) return k + 1;
        t = (T - t == dt) ? T : t + dt;
        ++k;
    }
    return k;
}

DiffusionStepper::DiffusionStepper(const Grid& grid, double d) : grid_(grid), d_(d) {
    if (!(d > 0.0)) throw PreconditionError("diffusion rate must be positive");
    w_ = quadrature_weights(grid).weights;
    if (grid.dim() == 1) {
        const int n = grid.points(0);
        kappa_.assign(n - 1, 1.0 / grid.spacing(0));
        c_.resize(n);
        r_.resize(n);
    } else {
        K_ = stiffness_matrix(grid);
        A_ = K_;
    }
}

void DiffusionStepper::step(std::span<const double> u, std::span<const double> gain, std::span<const double> loss,
                            double dt, std::span<double> out) {
    const std::size_t n = grid_.size();
    if (u.size() != n || gain.size() != n || loss.size() != n || out.size() != n)
        throw PreconditionError("stepper input size mismatch");
    const double s = dt * d_;

    if (grid_.dim() == 1) {
        // Symmetric tridiagonal M-matrix: diag w(1 + dt loss) + s K. Thomas
        // elimination without pivoting is stable here.
        const int m = static_cast<int>(n);
        auto diag = [&](int i) {
            double k = 0.0;
            if (i > 0) k += kappa_[i - 1];
            if (i + 1 < m) k += kappa_[i];
            return w_[i] * (1.0 + dt * loss[i]) + s * k;
        };
        double b = diag(0);
        c_[0] = -s * kappa_[0] / b;
        r_[0] = w_[0] * u[0] * (1.0 + dt * gain[0]) / b;
        for (int i = 1; i < m; ++i) {
            const double a = -s * kappa_[i - 1];
            b = diag(i) - a * c_[i - 1];
            c_[i] = (i + 1 < m) ? -s * kappa_[i] / b : 0.0;
            r_[i] = (w_[i] * u[i] * (1.0 + dt * gain[i]) - a * r_[i - 1]) / b;
        }
        out[m - 1] = r_[m - 1];
        for (int i = m - 2; i >= 0; --i) out[i] = r_[i] - c_[i] * out[i + 1];
        return;
    }

    for (int k = 0; k < A_.outerSize(); ++k) {
        Eigen::SparseMatrix<double>::InnerIterator ia(A_, k);
        Eigen::SparseMatrix<double>::InnerIterator ik(K_, k);
        for (; ia; ++ia, ++ik) {
            double v = s * ik.value();
            if (ia.row() == ia.col()) v += w_[ia.row()] * (1.0 + dt * loss[ia.row()]);
            ia.valueRef() = v;
        }
    }
    if (!analyzed_) {
        ldlt_.analyzePattern(A_);
        analyzed_ = true;
    }
    ldlt_.factorize(A_);
    if (ldlt_.info() != Eigen::Success) throw SolverError("diffusion step factorization failed");
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w_[i] * u[i] * (1.0 + dt * gain[i]);
    Eigen::VectorXd x = ldlt_.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, x[i]);
}

}  // namespace lvdiff
