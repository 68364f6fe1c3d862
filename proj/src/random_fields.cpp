#include <algorithm>
#include "lvdiff/random_fields.hpp"

#include <cmath>
#include <numbers>

namespace lvdiff {

ScalarField random_cosine_field(const Grid& g, Rng& rng, int modes) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> freq(1, 6);
    std::vector<std::array<double, 3>> terms;  // amplitude, kx, ky
    for (int m = 0; m < modes; ++m) {
        const double a = amp(rng);
        int kx = freq(rng);
        int ky = g.dim() == 2 ? freq(rng) - 1 : 0;
        if (g.dim() == 2 && (m % 2 == 1)) std::swap(kx, ky);
        terms.push_back({a, static_cast<double>(kx), static_cast<double>(ky)});
    }
    const double lx = g.extent(0);
    const double ly = g.dim() == 2 ? g.extent(1) : 1.0;
    ScalarField f = ScalarField::sample(g, [&](double x, double y) {
        double s = 0.0;
        for (const auto& t : terms)
            s += t[0] * std::cos(t[1] * std::numbers::pi * x / lx) * std::cos(t[2] * std::numbers::pi * y / ly);
        return s;
    });
    const double n = norm_inf(f);
    return n > 0.0 ? (1.0 / n) * f : random_cosine_field(g, rng, modes);
}

ScalarField random_weight(const Grid& g, Rng& rng, IntegralSign sign) {
    const ScalarField f = random_cosine_field(g, rng);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    switch (sign) {
        case IntegralSign::zero: return f;
        case IntegralSign::negative: return f + (-frac(rng) * sup_field(f));
        case IntegralSign::positive: return f + frac(rng) * (-inf_field(f));
    }
    return f;
}

ScalarField random_positive_field(const Grid& g, Rng& rng, double lo, double hi) {
    const ScalarField f = random_cosine_field(g, rng);
    const double a = inf_field(f), b = sup_field(f);
    return f.map([&](double v) { return std::clamp(lo + (hi - lo) * (v - a) / (b - a), lo, hi); });
}

std::pair<ScalarField, ScalarField> random_h1_pair(const Grid& g, Rng& rng) {
    std::uniform_real_distribution<double> base(0.8, 2.0), var(0.2, 0.7);
    auto make = [&] {
        const double c = base(rng);
        const double a = var(rng) * c;
        return random_cosine_field(g, rng).map([&](double v) { return c + a * v; });
    };
    ScalarField r1 = make();
    ScalarField r2 = make();
    return {r1, r2};
}

}  // namespace lvdiff
