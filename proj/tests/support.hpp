#pragma once

#include <random>

#include "monoblock/monoblock.hpp"

namespace monoblock::fixtures {

/// sigma1 = k1 = rho1 = 1, eps = (1, 1), v = 0, g1* = xy, g2 = 1.
inline GasLiquidParams reference_gas_liquid() {
    GasLiquidParams gp;
    gp.g1star = [](double x, double y) { return x * y; };
    gp.g2 = constant_function(1.0);
    return gp;
}

/// Bilinear a + b x + c y + d xy with nonnegative coefficients, so it is >= 0 on the square.
inline ScalarFunction random_bilinear(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(0.0, scale);
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    return [=](double x, double y) { return a + b * x + c * y + d * x * y; };
}

inline GridPair random_grid(const Mesh& m, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    GridPair g(m);
    for (int a = 0; a < kComponents; ++a) {
        for (double& v : g.values(a)) v = u(rng);
    }
    return g;
}

inline GridPair with_boundary(const BlockSystem& sys, GridPair u) {
    const Mesh& m = sys.mesh();
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                if (m.is_boundary(i, j)) u(a, i, j) = sys.boundary()(a, i, j);
            }
        }
    }
    return u;
}

} // namespace monoblock::fixtures
