#include "lvdiff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lvdiff/errors.hpp"

namespace lvdiff {

namespace {

std::vector<double> axis_weights(int n, double h) {
    std::vector<double> w(n, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

// Visits every grid edge (a, b) with its stiffness coefficient kappa so that
// K = sum kappa (e_a - e_b)(e_a - e_b)^T.
template <typename Fn>
void for_each_edge(const Grid& grid, Fn&& fn) {
    const int nx = grid.points(0);
    const double hx = grid.spacing(0);
    if (grid.dim() == 1) {
        for (int i = 0; i + 1 < nx; ++i) fn(grid.node(i), grid.node(i + 1), 1.0 / hx);
        return;
    }
    const int ny = grid.points(1);
    const double hy = grid.spacing(1);
    const auto wx = axis_weights(nx, hx);
    const auto wy = axis_weights(ny, hy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) fn(grid.node(i, j), grid.node(i + 1, j), wy[j] / hx);
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) fn(grid.node(i, j), grid.node(i, j + 1), wx[i] / hy);
}

void check_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw PreconditionError("scalar field contains a non-finite value");
}

}  // namespace

Grid::Grid(int dim, std::array<double, 2> extent, std::array<int, 2> points)
    : dim_(dim), extent_(extent), points_(points) {}

Grid Grid::line(double length, int points) {
    if (!(length > 0.0)) throw PreconditionError("grid extent must be positive");
    if (points < 3) throw PreconditionError("grid needs at least 3 points per axis");
    return Grid(1, {length, 0.0}, {points, 1});
}

Grid Grid::box(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0)) throw PreconditionError("grid extent must be positive");
    if (nx < 3 || ny < 3) throw PreconditionError("grid needs at least 3 points per axis");
    return Grid(2, {lx, ly}, {nx, ny});
}

std::array<double, 2> Grid::coordinate(std::size_t node) const {
    const auto i = static_cast<int>(node % points_[0]);
    const auto j = static_cast<int>(node / points_[0]);
    const double x = (i == points_[0] - 1) ? extent_[0] : i * spacing(0);
    if (dim_ == 1) return {x, 0.0};
    const double y = (j == points_[1] - 1) ? extent_[1] : j * spacing(1);
    return {x, y};
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw PreconditionError("field length " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.size()));
    check_finite(values_);
}

ScalarField ScalarField::constant(const Grid& grid, double value) {
    return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(double, double)>& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto [x, y] = grid.coordinate(k);
        v[k] = fn(x, y);
    }
    return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), fn);
    return ScalarField(grid_, std::move(v));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw PreconditionError(std::string("grid mismatch in ") + what);
}

namespace {
template <typename Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op, const char* what) {
    require_same_grid(a.grid(), b.grid(), what);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(a[i], b[i]);
    return ScalarField(a.grid(), std::move(v));
}
}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, [](double x, double y) { return x + y; }, "field sum");
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, [](double x, double y) { return x - y; }, "field difference");
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return zip(a, b, [](double x, double y) { return x * y; }, "field product");
}
ScalarField operator*(double s, const ScalarField& a) {
    return a.map([s](double x) { return s * x; });
}
ScalarField operator+(const ScalarField& a, double c) {
    return a.map([c](double x) { return x + c; });
}

QuadratureWeights quadrature_weights(const Grid& grid) {
    const auto wx = axis_weights(grid.points(0), grid.spacing(0));
    if (grid.dim() == 1) return {grid, wx};
    const auto wy = axis_weights(grid.points(1), grid.spacing(1));
    std::vector<double> w(grid.size());
    for (int j = 0; j < grid.points(1); ++j)
        for (int i = 0; i < grid.points(0); ++i) w[grid.node(i, j)] = wx[i] * wy[j];
    return {grid, std::move(w)};
}

double integrate(const ScalarField& f, const QuadratureWeights& w) {
    require_same_grid(f.grid(), w.grid, "integrate");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w.weights[i] * f[i];
    return s;
}

double integrate(const ScalarField& f) { return integrate(f, quadrature_weights(f.grid())); }

double average(const ScalarField& f) { return integrate(f) / f.grid().measure(); }

double sup_field(const ScalarField& f) {
    return *std::max_element(f.values().begin(), f.values().end());
}

double inf_field(const ScalarField& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

double norm_inf(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double distance_inf(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "distance_inf");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double inner_product(const ScalarField& u, const ScalarField& v) {
    require_same_grid(u.grid(), v.grid(), "inner_product");
    const auto w = quadrature_weights(u.grid());
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += w.weights[i] * u[i] * v[i];
    return s;
}

bool is_constant(const ScalarField& f, double rel_tol) {
    return sup_field(f) - inf_field(f) <= rel_tol * std::max(1.0, norm_inf(f));
}

void neumann_laplacian_apply(const Grid& grid, std::span<const double> f, std::span<double> out) {
    if (f.size() != grid.size() || out.size() != grid.size())
        throw PreconditionError("grid mismatch in neumann_laplacian_apply");
    const int nx = grid.points(0);
    const int ny = grid.points(1);
    const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    for (int j = 0; j < ny; ++j) {
        const double* row = f.data() + grid.node(0, j);
        double* o = out.data() + grid.node(0, j);
        o[0] = 2.0 * (row[1] - row[0]) * ix2;
        for (int i = 1; i + 1 < nx; ++i) o[i] = ((row[i - 1] - row[i]) + (row[i + 1] - row[i])) * ix2;
        o[nx - 1] = 2.0 * (row[nx - 2] - row[nx - 1]) * ix2;
    }
    if (grid.dim() == 1) return;
    const double iy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
    for (int i = 0; i < nx; ++i) {
        auto at = [&](int j) { return f[grid.node(i, j)]; };
        out[grid.node(i, 0)] += 2.0 * (at(1) - at(0)) * iy2;
        for (int j = 1; j + 1 < ny; ++j)
            out[grid.node(i, j)] += ((at(j - 1) - at(j)) + (at(j + 1) - at(j))) * iy2;
        out[grid.node(i, ny - 1)] += 2.0 * (at(ny - 2) - at(ny - 1)) * iy2;
    }
}

ScalarField neumann_laplacian_apply(const ScalarField& f) {
    std::vector<double> out(f.size());
    neumann_laplacian_apply(f.grid(), f.values(), out);
    return ScalarField(f.grid(), std::move(out));
}

Eigen::SparseMatrix<double> stiffness_matrix(const Grid& grid) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(4 * grid.size() * grid.dim());
    for_each_edge(grid, [&](std::size_t a, std::size_t b, double k) {
        const auto ia = static_cast<int>(a);
        const auto ib = static_cast<int>(b);
        t.emplace_back(ia, ia, k);
        t.emplace_back(ib, ib, k);
        t.emplace_back(ia, ib, -k);
        t.emplace_back(ib, ia, -k);
    });
    const auto n = static_cast<int>(grid.size());
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

Eigen::SparseMatrix<double> laplacian_matrix(const Grid& grid) {
    Eigen::SparseMatrix<double> L = -stiffness_matrix(grid);
    const auto w = quadrature_weights(grid);
    for (int k = 0; k < L.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(L, k); it; ++it)
            it.valueRef() /= w.weights[it.row()];
    return L;
}

double dirichlet_energy(const Grid& grid, std::span<const double> f) {
    double e = 0.0;
    for_each_edge(grid, [&](std::size_t a, std::size_t b, double k) {
        const double d = f[a] - f[b];
        e += k * d * d;
    });
    return e;
}

double dirichlet_energy(const ScalarField& f) { return dirichlet_energy(f.grid(), f.values()); }

double log_gradient_energy(const ScalarField& f) {
    if (!(inf_field(f) > 0.0)) throw PreconditionError("log_gradient_energy requires a positive field");
    double e = 0.0;
    for_each_edge(f.grid(), [&](std::size_t a, std::size_t b, double k) {
        const double d = f[a] - f[b];
        e += k * d * d / (f[a] * f[b]);
    });
    return e;
}

}  // namespace lvdiff
