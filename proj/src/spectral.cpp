#include "lvdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "lvdiff/errors.hpp"

namespace lvdiff {

const char* to_string(IntegralSign s) {
    switch (s) {
        case IntegralSign::negative: return "negative";
        case IntegralSign::zero: return "zero";
        case IntegralSign::positive: return "positive";
    }
    return "?";
}

WeightClass classify_weight(const ScalarField& h) {
    WeightClass c;
    const double scale = norm_inf(h);
    c.integral = integrate(h);
    c.identically_zero = scale == 0.0;
    const double eps_int = 1e-10 * h.grid().measure() * scale;
    if (c.integral > eps_int) c.integral_sign = IntegralSign::positive;
    else if (c.integral < -eps_int) c.integral_sign = IntegralSign::negative;
    else c.integral_sign = IntegralSign::zero;
    const double eps = 1e-12 * scale;
    c.changes_sign = inf_field(h) < -eps && sup_field(h) > eps;
    return c;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// The symmetrized stiffness Khat = W^{-1/2} K W^{-1/2}. With y = W^{1/2} phi the
// weighted problems become ordinary symmetric ones.
struct SymForm {
    Grid grid;
    Vec w, sqrtw;
    SpMat K, Khat;
    double khat_norm;  // Gershgorin bound

    explicit SymForm(const Grid& g) : grid(g), K(stiffness_matrix(g)) {
        const auto q = quadrature_weights(g);
        w = Eigen::Map<const Vec>(q.weights.data(), q.weights.size());
        sqrtw = w.array().sqrt();
        Khat = K;
        for (int k = 0; k < Khat.outerSize(); ++k)
            for (SpMat::InnerIterator it(Khat, k); it; ++it)
                it.valueRef() /= sqrtw[it.row()] * sqrtw[it.col()];
        khat_norm = 0.0;
        for (int k = 0; k < Khat.outerSize(); ++k) {
            double row = 0.0;
            for (SpMat::InnerIterator it(Khat, k); it; ++it) row += std::abs(it.value());
            khat_norm = std::max(khat_norm, row);
        }
    }

    // Edge energy phi^T K phi, accurate for nearly constant phi.
    double energy(const Vec& phi) const {
        return dirichlet_energy(grid, std::span<const double>(phi.data(), phi.size()));
    }

    // Weighted sum of h phi^2.
    double potential(const Vec& phi, const Vec& h) const {
        return (w.array() * h.array() * phi.array().square()).sum();
    }

    double mass(const Vec& phi) const { return (w.array() * phi.array().square()).sum(); }
};

Vec as_vec(const ScalarField& f) { return Eigen::Map<const Vec>(f.values().data(), f.size()); }

ScalarField as_field(const Grid& g, const Vec& v) { return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size())); }

// Rayleigh quotient of -d Lap - h from the eigenfunction representation phi.
double stable_rq(const SymForm& f, double d, const Vec& h, const Vec& phi) {
    return (d * f.energy(phi) - f.potential(phi, h)) / f.mass(phi);
}

double sym_residual(const SymForm& f, double d, const Vec& h, double mu, const Vec& y) {
    const Vec r = d * (f.Khat * y) - (h.array() * y.array()).matrix() - mu * y;
    return r.norm() / y.norm();
}

SpectralResult make_result(const SymForm& f, double d, const Vec& h, Vec y, int iterations, const char* method) {
    if (y.sum() < 0.0) y = -y;
    y /= y.norm();
    Vec phi = (y.array() / f.sqrtw.array()).matrix();
    const double mu = stable_rq(f, d, h, phi);
    const double res = sym_residual(f, d, h, mu, y);
    return SpectralResult{mu, as_field(f.grid, phi), res, iterations, method};
}

SpectralResult mu1_dense_impl(const SymForm& f, double d, const Vec& h) {
    const auto n = f.w.size();
    if (static_cast<std::size_t>(n) > kDenseLimit)
        throw PreconditionError("dense eigensolve limited to " + std::to_string(kDenseLimit) + " points");
    Eigen::MatrixXd A = d * Eigen::MatrixXd(f.Khat);
    A.diagonal() -= h;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
    return make_result(f, d, h, es.eigenvectors().col(0), 1, "dense");
}

SpectralResult mu1_iterative(const SymForm& f, double d, const Vec& h, const SpectralOptions& opts) {
    const auto n = f.w.size();
    const double scale = d * f.khat_norm + h.cwiseAbs().maxCoeff();
    const double target = opts.tolerance * scale;

    // A - sigma I is an SPD M-matrix for every sigma below mu1.
    const double lower = (-h).minCoeff();
    double safe = lower - 1e-3 * (1.0 + std::abs(lower));
    double sigma = safe;

    SpMat base = d * f.Khat;
    base.makeCompressed();
    SpMat shifted = base;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    ldlt.analyzePattern(shifted);

    auto factor = [&](double s) {
        shifted = base;
        for (int k = 0; k < static_cast<int>(n); ++k) shifted.coeffRef(k, k) -= h[k] + s;
        ldlt.factorize(shifted);
        return ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
    };

    Vec y = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    double last_res = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        int backoff = 0;
        while (!factor(sigma)) {
            sigma = 0.5 * (sigma + safe);
            if (++backoff > 60) throw SolverError("shift backoff failed in mu1", last_res);
        }
        safe = sigma;
        Vec z = ldlt.solve(y);
        if (!z.allFinite()) throw SolverError("non-finite iterate in mu1", last_res);
        y = z / z.norm();
        const Vec phi = (y.array() / f.sqrtw.array()).matrix();
        const double rho = stable_rq(f, d, h, phi);
        last_res = sym_residual(f, d, h, rho, y);
        if (last_res <= target) return make_result(f, d, h, y, it, "inverse_iteration");
        // Some eigenvalue lies within last_res of rho; aiming just below it
        // accelerates convergence, and the inertia test catches overshoot.
        sigma = std::max(safe, rho - 2.0 * last_res);
    }
    throw SolverError("mu1 inverse iteration did not converge", last_res);
}

}  // namespace

SpectralResult mu1(double d, const ScalarField& h, const SpectralOptions& opts) {
    if (!(d > 0.0)) throw PreconditionError("mu1 requires d > 0");
    const SymForm f(h.grid());
    const Vec hv = as_vec(h);
    try {
        return mu1_iterative(f, d, hv, opts);
    } catch (const SolverError&) {
        if (!opts.dense_fallback || h.size() > kDenseLimit) throw;
        return mu1_dense_impl(f, d, hv);
    }
}

SpectralResult mu1_dense(double d, const ScalarField& h) {
    if (!(d > 0.0)) throw PreconditionError("mu1 requires d > 0");
    const SymForm f(h.grid());
    return mu1_dense_impl(f, d, as_vec(h));
}

double mu1_residual(double d, const ScalarField& h, double mu, const ScalarField& phi) {
    require_same_grid(h.grid(), phi.grid(), "mu1_residual");
    const SymForm f(h.grid());
    const Vec y = (as_vec(phi).array() * f.sqrtw.array()).matrix();
    return sym_residual(f, d, as_vec(h), mu, y);
}

namespace {

void require_sign_change(const WeightClass& c) {
    if (!c.changes_sign) throw PreconditionError("principal theory inapplicable: weight does not change sign");
}

// Residual of Khat y = lambda h y, relative to the operator scale.
double pencil_residual(const SymForm& f, const Vec& h, double lambda, const Vec& phi) {
    Vec y = (phi.array() * f.sqrtw.array()).matrix();
    y /= y.norm();
    const Vec r = f.Khat * y - lambda * (h.array() * y.array()).matrix();
    return r.norm();
}

// Negative-integral case only; the positive case is reduced to it by h -> -h.
SpectralResult lambda1_negative(const ScalarField& h, const SpectralOptions& opts) {
    const SymForm f(h.grid());
    const Vec hv = as_vec(h);
    auto at = [&](double lambda) { return mu1(1.0, lambda * h, opts); };

    // f(lambda) = mu1(1, lambda h) is concave with f(0) = 0 and f'(0) > 0; find a
    // point right of the positive root.
    double lambda = 1.0 / std::max(1e-300, norm_inf(h));
    SpectralResult cur = at(lambda);
    int expand = 0;
    while (cur.eigenvalue >= 0.0) {
        lambda *= 2.0;
        cur = at(lambda);
        if (++expand > 200) throw SolverError("lambda1: no sign change of mu1(1, lambda h) found");
    }

    // Newton on the concave map from the right; the update is the pencil
    // Rayleigh quotient E(phi) / sum w h phi^2 and decreases monotonically.
    int total = cur.iterations;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const Vec phi = as_vec(cur.eigenfunction);
        const double pot = f.potential(phi, hv);
        if (!(pot > 0.0)) throw SolverError("lambda1: degenerate pencil");
        const double next = f.energy(phi) / pot;
        const bool done = std::abs(next - lambda) <= 4e-16 * lambda || next >= lambda;
        lambda = std::min(lambda, next);
        if (done) break;
        cur = at(lambda);
        total += cur.iterations;
    }
    const Vec phi = as_vec(cur.eigenfunction);
    return SpectralResult{lambda, cur.eigenfunction, pencil_residual(f, hv, lambda, phi), total, "newton"};
}

}  // namespace

Lambda1Result lambda1(const ScalarField& h, const SpectralOptions& opts) {
    const WeightClass c = classify_weight(h);
    require_sign_change(c);
    if (c.integral_sign == IntegralSign::zero) return NoNonzeroPrincipal{c.integral};
    if (c.integral_sign == IntegralSign::negative) return lambda1_negative(h, opts);
    SpectralResult r = lambda1_negative(-1.0 * h, opts);
    r.eigenvalue = -r.eigenvalue;
    return r;
}

Lambda1Result lambda1_dense(const ScalarField& h) {
    const WeightClass c = classify_weight(h);
    require_sign_change(c);
    if (c.integral_sign == IntegralSign::zero) return NoNonzeroPrincipal{c.integral};
    if (h.size() > kDenseLimit) throw PreconditionError("dense pencil solve limited to kDenseLimit points");

    const SymForm f(h.grid());
    const Vec hv = as_vec(h);
    const Eigen::MatrixXd Kd(f.K);
    const Eigen::MatrixXd B = (f.w.array() * hv.array()).matrix().asDiagonal();
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(Kd, B, false);
    if (ges.info() != Eigen::Success) throw SolverError("QZ failed in lambda1_dense");

    const double want = (c.integral_sign == IntegralSign::negative) ? 1.0 : -1.0;
    const auto alphas = ges.alphas();
    const auto betas = ges.betas();
    std::vector<double> candidates;
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
        if (std::abs(betas[i]) < 1e-14 * (std::abs(alphas[i]) + 1.0)) continue;
        const std::complex<double> l = alphas[i] / betas[i];
        if (std::abs(l.imag()) > 1e-8 * (1.0 + std::abs(l.real()))) continue;
        if (want * l.real() <= 1e-10) continue;
        candidates.push_back(l.real());
    }
    std::sort(candidates.begin(), candidates.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });

    const Eigen::MatrixXd Kh(f.Khat);
    for (double lambda : candidates) {
        Vec y;
        // Null vector of the symmetric Khat - lambda H, refined with the pencil
        // Rayleigh quotient.
        for (int pass = 0; pass < 4; ++pass) {
            Eigen::MatrixXd A = Kh;
            A.diagonal() -= lambda * hv;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
            Eigen::Index k;
            es.eigenvalues().cwiseAbs().minCoeff(&k);
            y = es.eigenvectors().col(k);
            if (y.sum() < 0.0) y = -y;
            const Vec phi = (y.array() / f.sqrtw.array()).matrix();
            const double pot = f.potential(phi, hv);
            if (pot == 0.0) break;
            lambda = f.energy(phi) / pot;
        }
        // Principal eigenfunctions can decay below rounding where h < 0, so only
        // a negative part above the noise level disqualifies a candidate.
        const double tol = 1e-8 * y.cwiseAbs().maxCoeff();
        if ((y.array() > -tol).all()) {
            y /= y.norm();
            const Vec phi = (y.array() / f.sqrtw.array()).matrix();
            return SpectralResult{lambda, as_field(f.grid, phi), pencil_residual(f, hv, lambda, phi), 1, "dense_qz"};
        }
    }
    throw SolverError("lambda1_dense: no sign-definite eigenfunction among pencil eigenpairs");
}

double lambda1_by_bisection(const ScalarField& h, double rel_tol) {
    const WeightClass c = classify_weight(h);
    require_sign_change(c);
    if (c.integral_sign != IntegralSign::negative)
        throw PreconditionError("lambda1_by_bisection requires a negative integral");
    double lo = std::log(1e-6), hi = std::log(1e6);
    auto g = [&](double logd) { return mu1(std::exp(logd), h).eigenvalue; };
    if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) throw SolverError("lambda1_by_bisection: bracket [1e-6, 1e6] not found");
    while (hi - lo > rel_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 1.0 / std::exp(0.5 * (lo + hi));
}

Mu1LimitsReport mu1_limits_check(const ScalarField& h, int samples, double d_min, double d_max) {
    if (is_constant(h)) throw PreconditionError("mu1_limits_check requires a non-constant weight");
    if (samples < 3) throw PreconditionError("mu1_limits_check needs at least 3 samples");
    Mu1LimitsReport r;
    const double a = std::log(d_min), b = std::log(d_max);
    for (int k = 0; k < samples; ++k) {
        const double d = std::exp(a + (b - a) * k / (samples - 1));
        r.d.push_back(d);
        r.mu.push_back(mu1(d, h).eigenvalue);
    }
    const double scale = 1.0 + norm_inf(h);
    for (int k = 0; k + 1 < samples; ++k) {
        if (!(r.mu[k + 1] > r.mu[k])) r.increasing = false;
        const double mid = mu1(0.5 * (r.d[k] + r.d[k + 1]), h).eigenvalue;
        if (mid < 0.5 * (r.mu[k] + r.mu[k + 1]) - 1e-12 * scale) r.concave = false;
    }
    r.small_d_value = r.mu.front();
    r.small_d_limit = -sup_field(h);
    r.large_d_value = r.mu.back();
    r.large_d_limit = -average(h);
    return r;
}

}  // namespace lvdiff
