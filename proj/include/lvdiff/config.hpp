#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lvdiff/grid.hpp"

namespace lvdiff {

struct H1Report {
    bool ok = true;
    std::vector<std::string> violations;
};

/// r1, r2 >= 0; positive averages; (r1, r2) not a constant vector.
H1Report validate_h1(const ScalarField& r1, const ScalarField& r2);
/// Throws ConfigError naming the first violated clause.
void require_h1(const ScalarField& r1, const ScalarField& r2);

struct GridSpec {
    int dim = 1;
    std::array<int, 2> points{257, 1};
    std::array<double, 2> extent{1.0, 1.0};

    Grid make() const;
};

/// A growth rate given either as an expression in x, y or as a field CSV.
struct RateSpec {
    std::string expression;
    std::string file;

    ScalarField sample(const Grid& grid) const;
};

struct SweepRange {
    double min = 1e-2;
    double max = 1e2;
    int count = 21;
    bool log = true;

    std::vector<double> values() const;
};

enum class ModelKind { logistic, competition, leslie_gower };
const char* to_string(ModelKind m);

struct ExperimentConfig {
    GridSpec grid;
    ModelKind model = ModelKind::logistic;
    std::map<std::string, double> params;
    std::map<std::string, RateSpec> rates;
    SweepRange sweep_d1;
    SweepRange sweep_d2;
    std::map<std::string, double> tolerances;
    double horizon = 500.0;
    std::uint64_t seed = 20240917;
    std::string output_dir = "out";

    double param(const std::string& key) const;
    double param_or(const std::string& key, double fallback) const;
    double tolerance_or(const std::string& key, double fallback) const;
    ScalarField rate(const std::string& key, const Grid& grid) const;
    bool has_rate(const std::string& key) const { return rates.count(key) != 0; }

    nlohmann::json to_json() const;
};

/// Parses and validates; relative file paths are resolved against base_dir.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace lvdiff
