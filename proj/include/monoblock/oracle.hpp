#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "monoblock/discretization.hpp"
#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/problem.hpp"

// Reference Newton solver for the full nonlinear scheme. Used by tests only; it shares
// stencil assembly with the monotone engine and nothing else.

namespace monoblock::oracle {

/// Row-major dense square matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) noexcept { return a[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return a[r * n + c]; }
};

/// Gaussian elimination with partial pivoting; `m` is consumed.
inline std::vector<double> dense_solve(DenseMatrix m, std::vector<double> rhs) {
    const std::size_t n = m.n;
    double scale = 0.0;
    for (double v : m.a) scale = std::max(scale, std::abs(v));
    const double tiny = scale * 1e-14 * static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
        }
        if (!(std::abs(m(piv, k)) > tiny)) {
            throw SingularMatrixError("dense_solve: singular matrix at column " + std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
            std::swap(rhs[k], rhs[piv]);
        }
        const double inv = 1.0 / m(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = m(r, k) * inv;
            if (factor == 0.0) continue;
            m(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= factor * m(k, c);
            rhs[r] -= factor * rhs[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= m(k, c) * x[c];
        x[k] = s / m(k, k);
    }
    return x;
}

/// Interior unknown numbering: component-major, then column i, then row j.
class UnknownIndex {
public:
    explicit UnknownIndex(const Mesh& m)
        : rows_(m.interior_rows()), per_component_(static_cast<std::size_t>(m.interior_rows()) *
                                                   static_cast<std::size_t>(m.interior_columns())) {}

    std::size_t operator()(int alpha, int i, int j) const noexcept {
        return static_cast<std::size_t>(alpha) * per_component_ +
               static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(rows_) +
               static_cast<std::size_t>(j - 1);
    }
    std::size_t size() const noexcept { return 2 * per_component_; }

private:
    int rows_;
    std::size_t per_component_;
};

/// Full-scheme residual at interior nodes, written node by node from the five-point
/// stencil (boundary neighbours read from g).
inline std::vector<double> scheme_residual(const BlockSystem& sys, const ProblemSpec& p,
                                           const GridPair& u) {
    const Mesh& m = sys.mesh();
    const StencilCoefficients& s = sys.coefficients();
    const GridPair& g = sys.boundary();
    const UnknownIndex idx(m);
    std::vector<double> res(idx.size());
    auto value = [&](int a, int i, int j) { return m.is_boundary(i, j) ? g(a, i, j) : u(a, i, j); };
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 1; i < m.nx(); ++i) {
            for (int j = 1; j < m.ny(); ++j) {
                const double lin = s.d(a, i, j) * u(a, i, j) - s.l(a, i, j) * value(a, i - 1, j) -
                                   s.r(a, i, j) * value(a, i + 1, j) - s.b(a, i, j) * value(a, i, j - 1) -
                                   s.t(a, i, j) * value(a, i, j + 1);
                res[idx(a, i, j)] = lin + eval_reaction(p, a, m.x(i), m.y(j), u(0, i, j), u(1, i, j));
            }
        }
    }
    return res;
}

/// Jacobian of scheme_residual: stencil entries plus the 2x2 reaction block per node.
inline DenseMatrix scheme_jacobian(const BlockSystem& sys, const ProblemSpec& p, const GridPair& u) {
    const Mesh& m = sys.mesh();
    const StencilCoefficients& s = sys.coefficients();
    const UnknownIndex idx(m);
    DenseMatrix J(idx.size());
    for (int i = 1; i < m.nx(); ++i) {
        for (int j = 1; j < m.ny(); ++j) {
            const auto df = reaction_derivatives(p, m.x(i), m.y(j), u(0, i, j), u(1, i, j));
            for (int a = 0; a < kComponents; ++a) {
                const std::size_t row = idx(a, i, j);
                J(row, row) = s.d(a, i, j) + df[2 * a + a];
                J(row, idx(1 - a, i, j)) = df[2 * a + (1 - a)];
                if (i > 1) J(row, idx(a, i - 1, j)) = -s.l(a, i, j);
                if (i < m.nx() - 1) J(row, idx(a, i + 1, j)) = -s.r(a, i, j);
                if (j > 1) J(row, idx(a, i, j - 1)) = -s.b(a, i, j);
                if (j < m.ny() - 1) J(row, idx(a, i, j + 1)) = -s.t(a, i, j);
            }
        }
    }
    return J;
}

struct NewtonConfig {
    double tol = 1e-10;  ///< residual max-norm target
    int max_newton = 50;
    double damping = 1.0; ///< initial step factor in (0, 1]
};

struct NewtonResult {
    GridPair solution;
    int iterations = 0;
    double residual = 0.0;
};

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Damped Newton on the full scheme; the step factor halves while the residual grows.
inline NewtonResult newton_solve(const BlockSystem& sys, const ProblemSpec& p, const GridPair& start,
                                 NewtonConfig cfg = {}) {
    if (!(cfg.tol > 0.0)) throw PreconditionError("newton_solve: tol must be positive");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
        throw PreconditionError("newton_solve: damping must lie in (0, 1]");
    }
    const Mesh& m = sys.mesh();
    require_same_mesh(m, start.mesh(), "newton_solve");
    const UnknownIndex idx(m);

    GridPair u = start;
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                if (m.is_boundary(i, j)) u(a, i, j) = sys.boundary()(a, i, j);
            }
        }
    }

    std::vector<double> res = scheme_residual(sys, p, u);
    double norm = max_abs(res);
    int it = 0;
    while (norm > cfg.tol) {
        if (it == cfg.max_newton) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "newton_solve: residual %.3e after %d steps", norm, it);
            throw NonconvergenceError(buf, norm);
        }
        std::vector<double> neg(res.size());
        std::transform(res.begin(), res.end(), neg.begin(), [](double r) { return -r; });
        const std::vector<double> delta = dense_solve(scheme_jacobian(sys, p, u), std::move(neg));

        double lambda = cfg.damping;
        GridPair trial = u;
        std::vector<double> trial_res;
        double trial_norm = std::numeric_limits<double>::infinity();
        for (int halvings = 0; halvings < 40; ++halvings) {
            for (int a = 0; a < kComponents; ++a) {
                for (int i = 1; i < m.nx(); ++i) {
                    for (int j = 1; j < m.ny(); ++j) trial(a, i, j) = u(a, i, j) + lambda * delta[idx(a, i, j)];
                }
            }
            trial_res = scheme_residual(sys, p, trial);
            trial_norm = max_abs(trial_res);
            if (trial_norm <= norm) break;
            lambda *= 0.5;
        }
        if (!(trial_norm <= norm)) {
            throw NonconvergenceError("newton_solve: line search failed to reduce the residual", norm);
        }
        u = std::move(trial);
        res = std::move(trial_res);
        norm = trial_norm;
        ++it;
    }
    return {std::move(u), it, norm};
}

/// Midpoint of an ordered pair; the default Newton start.
inline GridPair midpoint(const GridPair& lower, const GridPair& upper) {
    GridPair mid(lower.mesh());
    for (int a = 0; a < kComponents; ++a) {
        auto lo = lower.values(a);
        auto up = upper.values(a);
        auto out = mid.values(a);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (lo[k] + up[k]);
    }
    return mid;
}

} // namespace monoblock::oracle
