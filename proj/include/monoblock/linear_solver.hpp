#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

#include "monoblock/discretization.hpp"
#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/tridiagonal.hpp"

namespace monoblock {

struct LinearSolveOptions {
    /// Residual max-norm target. Raised to the roundoff floor of the residual
    /// evaluation, 16 eps (max(d + c*) |W| + |G*| + |phi|), when that is larger.
    double tol = 1e-12;
    /// 0 selects 100 (nx + ny).
    int max_iter = 0;
};

struct LinearSolveResult {
    GridPair solution;
    int sweeps = 0;
    double residual = 0.0; ///< final max-norm residual, unscaled
};

namespace detail {

/// max_i |(A_i + C*_i) W_i - L_i W_{i-1} - R_i W_{i+1} - phi_i - G*_i|
inline double linear_residual_norm(const BlockSystem& sys, const GridPair& cstar, const GridPair& phi,
                                   const GridPair& w) {
    const Mesh& m = sys.mesh();
    const int n = m.interior_rows();
    std::vector<double> k0(n), k1(n);
    double worst = 0.0;
    for (int i = 1; i < m.nx(); ++i) {
        linear_part_column(sys, w, i, {std::span<double>(k0), std::span<double>(k1)});
        for (int j = 1; j < m.ny(); ++j) {
            const double r0 = k0[j - 1] + cstar(0, i, j) * w(0, i, j) - phi(0, i, j);
            const double r1 = k1[j - 1] + cstar(1, i, j) * w(1, i, j) - phi(1, i, j);
            worst = std::max({worst, std::abs(r0), std::abs(r1)});
        }
    }
    return worst;
}

} // namespace detail

/// Solves (L_h + c*) W = phi in the interior with W = g on the boundary (g is the data the
/// system was assembled with) by left-to-right block Gauss-Seidel line sweeps.
/// Only interior entries of `cstar` and `phi` are read.
inline LinearSolveResult solve_linear_detailed(const BlockSystem& sys, const GridPair& cstar,
                                               const GridPair& phi, LinearSolveOptions opt = {},
                                               const GridPair* initial_guess = nullptr) {
    const Mesh& m = sys.mesh();
    require_same_mesh(m, cstar.mesh(), "solve_linear");
    require_same_mesh(m, phi.mesh(), "solve_linear");
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 1; i < m.nx(); ++i) {
            for (int j = 1; j < m.ny(); ++j) {
                if (cstar(a, i, j) < 0.0) throw PreconditionError("solve_linear: c* must be nonnegative");
            }
        }
    }
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : 100 * (m.nx() + m.ny());
    double dmax = 0.0;
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 1; i < m.nx(); ++i) {
            for (int j = 1; j < m.ny(); ++j) {
                dmax = std::max(dmax, sys.coefficients().d(a, i, j) + cstar(a, i, j));
            }
        }
    }
    const double data_scale = sys.gstar_norm() + max_norm(phi);
    auto target_for = [&](const GridPair& w) {
        const double floor =
            16.0 * std::numeric_limits<double>::epsilon() * (dmax * max_norm(w) + data_scale);
        return std::max(opt.tol, floor);
    };

    GridPair w = initial_guess ? *initial_guess : GridPair(m);
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                if (m.is_boundary(i, j)) w(a, i, j) = sys.boundary()(a, i, j);
            }
        }
    }

    const int n = m.interior_rows();
    std::vector<double> rhs(n), shift(n), scratch(n);
    double res = detail::linear_residual_norm(sys, cstar, phi, w);
    double target = target_for(w);
    int sweep = 0;
    while (res > target && sweep < max_iter) {
        for (int i = 1; i < m.nx(); ++i) {
            for (int a = 0; a < kComponents; ++a) {
                const ColumnBlock& blk = sys.block(a, i);
                auto left = w.column(a, i - 1);
                auto right = w.column(a, i + 1);
                for (int k = 0; k < n; ++k) {
                    double s = phi(a, i, k + 1) + blk.gstar[k];
                    if (i > 1) s += blk.L[k] * left[k + 1];
                    if (i < m.nx() - 1) s += blk.R[k] * right[k + 1];
                    rhs[k] = s;
                    shift[k] = cstar(a, i, k + 1);
                }
                thomas_solve_into(blk.A, shift, rhs, w.column(a, i).subspan(1, n), scratch);
            }
        }
        ++sweep;
        res = detail::linear_residual_norm(sys, cstar, phi, w);
        target = target_for(w);
    }
    if (res > target) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "solve_linear: residual %.3e above %.3e after %d sweeps", res,
                      target, sweep);
        throw NonconvergenceError(buf, res);
    }
    return {std::move(w), sweep, res};
}

inline GridPair solve_linear(const BlockSystem& sys, const GridPair& cstar, const GridPair& phi,
                             LinearSolveOptions opt = {}) {
    return solve_linear_detailed(sys, cstar, phi, opt).solution;
}

} // namespace monoblock
