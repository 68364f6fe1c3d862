#include "lvdiff/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lvdiff/errors.hpp"
#include "lvdiff/expr.hpp"
#include "lvdiff/field_io.hpp"

namespace lvdiff {

using nlohmann::json;

H1Report validate_h1(const ScalarField& r1, const ScalarField& r2) {
    H1Report r;
    auto fail = [&](std::string s) {
        r.ok = false;
        r.violations.push_back(std::move(s));
    };
    if (!(r1.grid() == r2.grid())) {
        fail("r1 and r2 live on different grids");
        return r;
    }
    if (inf_field(r1) < 0.0) fail("r1 must be non-negative");
    if (inf_field(r2) < 0.0) fail("r2 must be non-negative");
    if (!(average(r1) > 0.0)) fail("average of r1 must be positive");
    if (!(average(r2) > 0.0)) fail("average of r2 must be positive");
    if (is_constant(r1) && is_constant(r2)) fail("(r1, r2) must not be a constant vector");
    return r;
}

void require_h1(const ScalarField& r1, const ScalarField& r2) {
    const H1Report r = validate_h1(r1, r2);
    if (!r.ok) throw ConfigError("growth-rate hypothesis violated: " + r.violations.front());
}

Grid GridSpec::make() const {
    if (dim == 1) return Grid::line(extent[0], points[0]);
    if (dim == 2) return Grid::box(extent[0], extent[1], points[0], points[1]);
    throw ConfigError("grid dim must be 1 or 2");
}

ScalarField RateSpec::sample(const Grid& grid) const {
    if (!file.empty()) {
        ScalarField f = read_field_csv(file);
        if (!(f.grid() == grid)) throw ConfigError("field file " + file + " does not match the configured grid");
        return f;
    }
    return parse_expression(expression).sample(grid);
}

std::vector<double> SweepRange::values() const {
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) {
        const double s = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        v[k] = log ? std::pow(10.0, std::log10(min) + s * (std::log10(max) - std::log10(min))) : min + s * (max - min);
    }
    return v;
}

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::competition: return "competition";
        case ModelKind::leslie_gower: return "leslie_gower";
    }
    return "?";
}

double ExperimentConfig::param(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
    return it->second;
}

double ExperimentConfig::param_or(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::tolerance_or(const std::string& key, double fallback) const {
    const auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

ScalarField ExperimentConfig::rate(const std::string& key, const Grid& grid) const {
    const auto it = rates.find(key);
    if (it == rates.end()) throw ConfigError("missing growth rate '" + key + "'");
    return it->second.sample(grid);
}

namespace {

SweepRange sweep_from(const json& j, const char* what) {
    SweepRange s;
    s.min = j.value("min", s.min);
    s.max = j.value("max", s.max);
    s.count = j.value("count", s.count);
    s.log = j.value("log", s.log);
    if (!(s.min > 0.0) || !(s.max >= s.min) || s.count < 1)
        throw ConfigError(std::string("invalid sweep range for ") + what);
    return s;
}

json sweep_to(const SweepRange& s) { return {{"min", s.min}, {"max", s.max}, {"count", s.count}, {"log", s.log}}; }

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            c.grid.dim = g.value("dim", 1);
            if (g.contains("points")) {
                if (g["points"].is_array()) {
                    c.grid.points[0] = g["points"].at(0).get<int>();
                    c.grid.points[1] = g["points"].size() > 1 ? g["points"][1].get<int>() : 1;
                } else {
                    c.grid.points[0] = g["points"].get<int>();
                    c.grid.points[1] = c.grid.dim == 2 ? c.grid.points[0] : 1;
                }
            }
            if (g.contains("extent")) {
                if (g["extent"].is_array()) {
                    c.grid.extent[0] = g["extent"].at(0).get<double>();
                    c.grid.extent[1] = g["extent"].size() > 1 ? g["extent"][1].get<double>() : 1.0;
                } else {
                    c.grid.extent = {g["extent"].get<double>(), g["extent"].get<double>()};
                }
            }
            if (c.grid.dim == 1) c.grid.points[1] = 1;
            (void)c.grid.make();
        }
        const std::string model = j.value("model", "logistic");
        if (model == "logistic") c.model = ModelKind::logistic;
        else if (model == "competition") c.model = ModelKind::competition;
        else if (model == "leslie_gower") c.model = ModelKind::leslie_gower;
        else throw ConfigError("unknown model '" + model + "'");

        if (j.contains("params"))
            for (const auto& [k, v] : j.at("params").items()) c.params[k] = v.get<double>();
        if (j.contains("rates")) {
            for (const auto& [k, v] : j.at("rates").items()) {
                RateSpec r;
                if (v.is_string()) {
                    r.expression = v.get<std::string>();
                    (void)parse_expression(r.expression);
                } else {
                    std::filesystem::path p = v.at("file").get<std::string>();
                    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                    if (!std::filesystem::exists(p)) throw ConfigError("field file not found: " + p.string());
                    r.file = p.string();
                }
                c.rates[k] = r;
            }
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            if (s.contains("d1")) c.sweep_d1 = sweep_from(s["d1"], "d1");
            if (s.contains("d2")) c.sweep_d2 = sweep_from(s["d2"], "d2");
        }
        if (j.contains("tolerances"))
            for (const auto& [k, v] : j.at("tolerances").items()) {
                c.tolerances[k] = v.get<double>();
                if (!(c.tolerances[k] > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
            }
        c.horizon = j.value("T", c.horizon);
        if (!(c.horizon > 0.0)) throw ConfigError("time horizon T must be positive");
        c.seed = j.value("seed", c.seed);
        c.output_dir = j.value("output", c.output_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

json ExperimentConfig::to_json() const {
    json rates_j = json::object();
    for (const auto& [k, r] : rates) rates_j[k] = r.file.empty() ? json(r.expression) : json{{"file", r.file}};
    json g = {{"dim", grid.dim}};
    if (grid.dim == 1) {
        g["points"] = grid.points[0];
        g["extent"] = grid.extent[0];
    } else {
        g["points"] = {grid.points[0], grid.points[1]};
        g["extent"] = {grid.extent[0], grid.extent[1]};
    }
    return {{"grid", g},
            {"model", lvdiff::to_string(model)},
            {"params", params},
            {"rates", rates_j},
            {"sweep", {{"d1", sweep_to(sweep_d1)}, {"d2", sweep_to(sweep_d2)}}},
            {"tolerances", tolerances},
            {"T", horizon},
            {"seed", seed},
            {"output", output_dir}};
}

}  // namespace lvdiff
