#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "monoblock/errors.hpp"

namespace monoblock {

/// Tridiagonal matrix stored by diagonals. Row k reads
/// sub[k] x[k-1] + diag[k] x[k] + super[k] x[k+1]; sub[0] and super[n-1] are unused.
struct Tridiagonal {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// y = (M + diag(shift)) x. `shift` may be empty.
    void multiply(std::span<const double> x, std::span<double> y,
                  std::span<const double> shift = {}) const {
        const std::size_t n = size();
        for (std::size_t k = 0; k < n; ++k) {
            double s = diag[k] * x[k];
            if (!shift.empty()) s += shift[k] * x[k];
            if (k > 0) s += sub[k] * x[k - 1];
            if (k + 1 < n) s += super[k] * x[k + 1];
            y[k] = s;
        }
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(size());
        multiply(x, y);
        return y;
    }
};

/// Solves (m + diag(shift)) x = rhs by the Thomas algorithm.
/// `scratch` must hold size() values; `x` may alias `rhs`.
inline void thomas_solve_into(const Tridiagonal& m, std::span<const double> shift,
                              std::span<const double> rhs, std::span<double> x,
                              std::span<double> scratch) {
    const std::size_t n = m.size();
    if (n == 0) return;
    auto pivot_at = [&](std::size_t k, double p) {
        if (p == 0.0 || !std::isfinite(p)) {
            throw ZeroPivotError("Thomas solve hit a zero pivot at row " + std::to_string(k));
        }
        return p;
    };
    // forward sweep: scratch holds the modified super-diagonal
    double pivot = pivot_at(0, m.diag[0] + (shift.empty() ? 0.0 : shift[0]));
    scratch[0] = n > 1 ? m.super[0] / pivot : 0.0;
    x[0] = rhs[0] / pivot;
    for (std::size_t k = 1; k < n; ++k) {
        const double dk = m.diag[k] + (shift.empty() ? 0.0 : shift[k]);
        pivot = pivot_at(k, dk - m.sub[k] * scratch[k - 1]);
        scratch[k] = k + 1 < n ? m.super[k] / pivot : 0.0;
        x[k] = (rhs[k] - m.sub[k] * x[k - 1]) / pivot;
    }
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= scratch[k] * x[k + 1];
}

inline std::vector<double> thomas_solve(const Tridiagonal& m, std::span<const double> rhs) {
    std::vector<double> x(m.size());
    std::vector<double> scratch(m.size());
    thomas_solve_into(m, {}, rhs, x, scratch);
    return x;
}

} // namespace monoblock
