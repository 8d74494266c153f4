#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lindyn/cosine.hpp"
#include "support/random.hpp"

namespace lindyn::testing {

inline int random_cells_per_unit() {
    static const int choices[] = {1, 2, 4, 8, 16};
    return choices[uniform_int(0, 4)];
}

inline cosine::GridFunction random_grid_function(int m, int max_units = 4) {
    const int len = uniform_int(1, max_units * m);
    std::vector<double> v(static_cast<std::size_t>(len));
    for (auto& x : v) x = uniform(-2.0, 2.0);
    return cosine::GridFunction(m, uniform_int(-3 * m, 3 * m), std::move(v));
}

inline cosine::Weight random_weight() {
    const int n = uniform_int(1, 5);
    std::vector<double> knots(static_cast<std::size_t>(n)), values(static_cast<std::size_t>(n));
    for (auto& k : knots) k = uniform(-4.0, 4.0);
    std::sort(knots.begin(), knots.end());
    for (auto& v : values) v = uniform(0.5, 3.0);
    return cosine::Weight::piecewise_linear(knots, values);
}

inline cosine::NormSpec random_spec() {
    switch (uniform_int(0, 4)) {
        case 0: return cosine::NormSpec::lp(1.0);
        case 1: return cosine::NormSpec::lp(uniform(1.0, 4.0));
        case 2: return cosine::NormSpec::sup();
        case 3: return cosine::NormSpec::orlicz_power(uniform(1.0, 3.0));
        default: return cosine::NormSpec::orlicz_exp();
    }
}

// Largest sample-wise relative deviation between two grid functions; the denominator is the
// larger magnitude at that cell, floored by `floor`.
inline double max_rel_diff(const cosine::GridFunction& a, const cosine::GridFunction& b, double floor = 0.0) {
    const std::int64_t lo = std::min(a.start(), b.start()), hi = std::max(a.end(), b.end());
    double worst = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        const double x = a.at_index(i), y = b.at_index(i);
        const double den = std::max({std::abs(x), std::abs(y), floor});
        if (den > 0.0) worst = std::max(worst, std::abs(x - y) / den);
    }
    return worst;
}

// Largest |a - b| / scale cellwise, where scale holds the magnitudes of the summands that
// produced a and b.  Cells with zero scale must agree exactly.
inline double max_scaled_diff(const cosine::GridFunction& a, const cosine::GridFunction& b,
                              const cosine::GridFunction& scale) {
    const std::int64_t lo = std::min({a.start(), b.start(), scale.start()});
    const std::int64_t hi = std::max({a.end(), b.end(), scale.end()});
    double worst = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        const double d = std::abs(a.at_index(i) - b.at_index(i)), s = scale.at_index(i);
        if (s > 0.0)
            worst = std::max(worst, d / s);
        else if (d > 0.0)
            return INFINITY;
    }
    return worst;
}

inline cosine::GridFunction abs_of(const cosine::GridFunction& f) {
    auto v = f.values();
    for (auto& x : v) x = std::abs(x);
    return cosine::GridFunction(f.cells_per_unit(), f.start(), v);
}

inline cosine::GridFunction shifted(const cosine::GridFunction& f, std::int64_t cells) {
    return cosine::GridFunction(f.cells_per_unit(), f.start() + cells, f.values());
}

}  // namespace lindyn::testing
