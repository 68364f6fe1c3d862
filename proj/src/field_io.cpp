#include "lvdiff/field_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "lvdiff/errors.hpp"

namespace lvdiff {

void write_field_csv(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid();
    os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
    os << std::setprecision(17);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto [x, y] = g.coordinate(k);
        os << x << ',';
        if (g.dim() == 2) os << y << ',';
        os << f[k] << '\n';
    }
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_field_csv(os, f);
}

ScalarField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("field CSV is empty");
    int dim = 0;
    if (line.rfind("x,value", 0) == 0) dim = 1;
    else if (line.rfind("x,y,value", 0) == 0) dim = 2;
    else throw ConfigError("field CSV header must be x,value or x,y,value");

    std::vector<double> xs, ys, vals;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("field CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != dim + 1)
            throw ConfigError("field CSV line " + std::to_string(lineno) + ": wrong column count");
        xs.push_back(row[0]);
        if (dim == 2) ys.push_back(row[1]);
        vals.push_back(row.back());
    }
    if (vals.empty()) throw ConfigError("field CSV has no data rows");

    int nx = 1;
    while (nx < static_cast<int>(xs.size()) && xs[nx] > xs[nx - 1]) ++nx;
    const double lx = xs[nx - 1];
    int ny = static_cast<int>(vals.size()) / nx;
    if (nx * ny != static_cast<int>(vals.size())) throw ConfigError("field CSV is not a tensor grid");
    const Grid g = (dim == 1) ? Grid::line(lx, nx) : Grid::box(lx, ys.back(), nx, ny);
    if (dim == 1 && ny != 1) throw ConfigError("1D field CSV coordinates are not increasing");
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const auto c = g.coordinate(k);
        const double tol = 1e-9 * std::max(1.0, std::abs(c[0]) + std::abs(c[1]));
        if (std::abs(c[0] - xs[k]) > tol || (dim == 2 && std::abs(c[1] - ys[k]) > tol))
            throw ConfigError("field CSV row " + std::to_string(k + 2) + " is off the uniform grid");
    }
    return ScalarField(g, std::move(vals));
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open field file " + path);
    return read_field_csv(is);
}

}  // namespace lvdiff
