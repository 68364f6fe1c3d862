#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

namespace lvdiff {

/// Uniform tensor grid on [0, Lx] or [0, Lx] x [0, Ly]. Nodes are ordered
/// x-fastest; node values are collocated (no cell averages).
class Grid {
public:
    static Grid line(double length, int points);
    static Grid box(double lx, double ly, int nx, int ny);

    int dim() const noexcept { return dim_; }
    double extent(int axis) const { return extent_.at(axis); }
    int points(int axis) const { return points_.at(axis); }
    double spacing(int axis) const { return extent_.at(axis) / (points_.at(axis) - 1); }

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(points_[0]) * static_cast<std::size_t>(points_[1]);
    }
    /// |Omega|
    double measure() const noexcept { return dim_ == 1 ? extent_[0] : extent_[0] * extent_[1]; }

    std::size_t node(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(j) * points_[0] + i;
    }
    std::array<double, 2> coordinate(std::size_t node) const;

    bool operator==(const Grid&) const = default;

private:
    Grid(int dim, std::array<double, 2> extent, std::array<int, 2> points);

    int dim_ = 1;
    std::array<double, 2> extent_{1.0, 0.0};
    std::array<int, 2> points_{3, 1};
};

/// Grid-sampled function. Immutable after construction; all values finite.
class ScalarField {
public:
    ScalarField(Grid grid, std::vector<double> values);

    static ScalarField constant(const Grid& grid, double value);
    static ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Pointwise transform.
    ScalarField map(const std::function<double(double)>& fn) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
ScalarField operator+(const ScalarField& a, double c);

/// Trapezoidal weights realizing the integral over Omega; they sum to |Omega|.
struct QuadratureWeights {
    Grid grid;
    std::vector<double> weights;
};

QuadratureWeights quadrature_weights(const Grid& grid);

/// Throws PreconditionError when grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

double integrate(const ScalarField& f);
double integrate(const ScalarField& f, const QuadratureWeights& w);
double average(const ScalarField& f);
double sup_field(const ScalarField& f);
double inf_field(const ScalarField& f);
double norm_inf(const ScalarField& f);
double distance_inf(const ScalarField& a, const ScalarField& b);
/// Quadrature inner product <u, v>_w.
double inner_product(const ScalarField& u, const ScalarField& v);

/// True when max - min <= rel_tol * max(1, max|f|).
bool is_constant(const ScalarField& f, double rel_tol = 1e-12);

/// Second-order Neumann Laplacian with mirror ghost points. Symmetric under
/// the trapezoidal inner product and annihilates constants.
ScalarField neumann_laplacian_apply(const ScalarField& f);
/// Same stencil on raw node values of `grid`.
void neumann_laplacian_apply(const Grid& grid, std::span<const double> f, std::span<double> out);

/// Symmetric stiffness K with -Laplacian = diag(w)^{-1} K.
Eigen::SparseMatrix<double> stiffness_matrix(const Grid& grid);
/// The Laplacian as an assembled (non-symmetric) matrix diag(w)^{-1} (-K).
Eigen::SparseMatrix<double> laplacian_matrix(const Grid& grid);

/// f^T K f, the discrete Dirichlet energy (integral of |grad f|^2), summed per edge.
double dirichlet_energy(const Grid& grid, std::span<const double> f);
double dirichlet_energy(const ScalarField& f);

/// Discrete integral of |grad f / f|^2 with the edge denominator f_i f_j.
/// Equals the quadrature of (Laplacian f)/f exactly. Requires f > 0.
double log_gradient_energy(const ScalarField& f);

}  // namespace lvdiff
