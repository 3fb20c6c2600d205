#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/problem.hpp"
#include "monoblock/tridiagonal.hpp"

namespace monoblock {

/// Five-point upwind coefficients of
///   d U_ij - l U_i-1,j - r U_i+1,j - b U_i,j-1 - t U_i,j+1
/// per component. Entries at boundary nodes are zero.
struct StencilCoefficients {
    GridPair l, r, b, t, d;
    std::array<SignClass, kComponents> sign{};
    /// v_a vanished at every mesh node.
    std::array<bool, kComponents> zero_convection{};

    explicit StencilCoefficients(const Mesh& mesh)
        : l(mesh), r(mesh), b(mesh), t(mesh), d(mesh) {}

    const Mesh& mesh() const noexcept { return d.mesh(); }
};

/// Upwind coefficients. v >= 0 uses backward differences (weight v/h on the left and
/// bottom neighbours); v < 0 uses forward differences (weight |v|/h on right and top).
inline StencilCoefficients assemble_stencil(const Mesh& mesh, const ProblemSpec& p) {
    validate_problem(mesh, p);
    StencilCoefficients s(mesh);
    const double hx2 = mesh.hx() * mesh.hx();
    const double hy2 = mesh.hy() * mesh.hy();
    for (int a = 0; a < kComponents; ++a) {
        s.sign[a] = p.convection_sign[a];
        bool all_zero = true;
        for (int i = 0; i <= mesh.nx(); ++i) {
            for (int j = 0; j <= mesh.ny(); ++j) {
                const double v = eval_convection(p, a, mesh.x(i), mesh.y(j));
                if (v != 0.0) all_zero = false;
                if (mesh.is_boundary(i, j)) continue;
                const double dx = p.eps[a] / hx2;
                const double dy = p.eps[a] / hy2;
                double l = dx, r = dx, b = dy, t = dy;
                if (v >= 0.0) {
                    l += v / mesh.hx();
                    b += v / mesh.hy();
                } else {
                    r += -v / mesh.hx();
                    t += -v / mesh.hy();
                }
                s.l(a, i, j) = l;
                s.r(a, i, j) = r;
                s.b(a, i, j) = b;
                s.t(a, i, j) = t;
                s.d(a, i, j) = l + r + b + t;
            }
        }
        s.zero_convection[a] = all_zero;
    }
    return s;
}

/// Block data of one interior column i for one component.
struct ColumnBlock {
    Tridiagonal A;              ///< diag d, sub -b, super -t, order ny-1
    std::vector<double> L;      ///< coupling to column i-1 (folded into gstar when i == 1)
    std::vector<double> R;      ///< coupling to column i+1 (folded into gstar when i == nx-1)
    std::vector<double> gstar;  ///< boundary load
};

/// Block-tridiagonal form of the scheme:
///   A_i U_i - L_i U_{i-1} - R_i U_{i+1} = -F_i(U_i) + G*_i,   i = 1..nx-1,
/// with all boundary values of g folded into G*.
class BlockSystem {
public:
    BlockSystem(StencilCoefficients coeffs, GridPair boundary,
                std::array<std::vector<ColumnBlock>, kComponents> blocks)
        : coeffs_(std::move(coeffs)), boundary_(std::move(boundary)), blocks_(std::move(blocks)) {
        for (const auto& col : blocks_) {
            for (const auto& blk : col) {
                for (double g : blk.gstar) gstar_norm_ = std::max(gstar_norm_, std::abs(g));
            }
        }
    }

    const Mesh& mesh() const noexcept { return coeffs_.mesh(); }
    const StencilCoefficients& coefficients() const noexcept { return coeffs_; }

    /// g at boundary nodes, zero inside.
    const GridPair& boundary() const noexcept { return boundary_; }

    /// Block of interior column i (1 <= i <= nx-1).
    const ColumnBlock& block(int alpha, int i) const noexcept { return blocks_[alpha][i - 1]; }

    double gstar_norm() const noexcept { return gstar_norm_; }

    SignClass sign(int alpha) const noexcept { return coeffs_.sign[alpha]; }
    bool zero_convection(int alpha) const noexcept { return coeffs_.zero_convection[alpha]; }

private:
    StencilCoefficients coeffs_;
    GridPair boundary_;
    std::array<std::vector<ColumnBlock>, kComponents> blocks_;
    double gstar_norm_ = 0.0;
};

inline BlockSystem assemble_block_system(const Mesh& mesh, StencilCoefficients coeffs,
                                         const std::array<ScalarFunction, kComponents>& g) {
    require_same_mesh(mesh, coeffs.mesh(), "assemble_block_system");
    GridPair boundary(mesh);
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= mesh.nx(); ++i) {
            for (int j = 0; j <= mesh.ny(); ++j) {
                if (!mesh.is_boundary(i, j)) continue;
                boundary(a, i, j) =
                    detail::checked(g[a](mesh.x(i), mesh.y(j)), "g", a, mesh.x(i), mesh.y(j));
            }
        }
    }

    const int n = mesh.interior_rows();
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    std::array<std::vector<ColumnBlock>, kComponents> blocks;
    for (int a = 0; a < kComponents; ++a) {
        blocks[a].resize(static_cast<std::size_t>(mesh.interior_columns()));
        for (int i = 1; i < nx; ++i) {
            ColumnBlock& blk = blocks[a][i - 1];
            blk.A = Tridiagonal(n);
            blk.L.assign(n, 0.0);
            blk.R.assign(n, 0.0);
            blk.gstar.assign(n, 0.0);
            for (int j = 1; j < ny; ++j) {
                const int k = j - 1;
                blk.A.diag[k] = coeffs.d(a, i, j);
                if (j > 1) blk.A.sub[k] = -coeffs.b(a, i, j);
                if (j < ny - 1) blk.A.super[k] = -coeffs.t(a, i, j);
                blk.L[k] = coeffs.l(a, i, j);
                blk.R[k] = coeffs.r(a, i, j);
                double load = 0.0;
                if (i == 1) load += coeffs.l(a, i, j) * boundary(a, 0, j);
                if (i == nx - 1) load += coeffs.r(a, i, j) * boundary(a, nx, j);
                if (j == 1) load += coeffs.b(a, i, j) * boundary(a, i, 0);
                if (j == ny - 1) load += coeffs.t(a, i, j) * boundary(a, i, ny);
                blk.gstar[k] = load;
            }
        }
    }
    return BlockSystem(std::move(coeffs), std::move(boundary), std::move(blocks));
}

/// Stencil plus block assembly for a problem's own boundary data.
inline BlockSystem assemble(const Mesh& mesh, const ProblemSpec& p) {
    return assemble_block_system(mesh, assemble_stencil(mesh, p), p.boundary);
}

/// Per-interior-column vectors for both components (e.g. residuals K_{a,i}).
class ColumnVectors {
public:
    explicit ColumnVectors(const Mesh& mesh) : mesh_(mesh) {
        for (auto& v : data_) {
            v.assign(static_cast<std::size_t>(mesh.interior_columns()) *
                         static_cast<std::size_t>(mesh.interior_rows()),
                     0.0);
        }
    }

    const Mesh& mesh() const noexcept { return mesh_; }

    /// Interior column i (1 <= i <= nx-1), entry k is row j = k+1.
    std::span<double> column(int alpha, int i) noexcept {
        return {data_[alpha].data() + offset(i), static_cast<std::size_t>(mesh_.interior_rows())};
    }
    std::span<const double> column(int alpha, int i) const noexcept {
        return {data_[alpha].data() + offset(i), static_cast<std::size_t>(mesh_.interior_rows())};
    }

    double operator()(int alpha, int i, int j) const noexcept {
        return data_[alpha][offset(i) + static_cast<std::size_t>(j - 1)];
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& v : data_) {
            for (double x : v) m = std::max(m, std::abs(x));
        }
        return m;
    }
    double min_value() const noexcept {
        double m = INFINITY;
        for (const auto& v : data_) {
            for (double x : v) m = std::min(m, x);
        }
        return m;
    }
    double max_value() const noexcept {
        double m = -INFINITY;
        for (const auto& v : data_) {
            for (double x : v) m = std::max(m, x);
        }
        return m;
    }

private:
    std::size_t offset(int i) const noexcept {
        return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(mesh_.interior_rows());
    }

    Mesh mesh_;
    std::array<std::vector<double>, kComponents> data_;
};

/// Applies the linear part A_i U_i - L_i U_{i-1} - R_i U_{i+1} - G*_i of column i, both
/// components. Boundary values of `u` are never read; g enters through G*.
inline void linear_part_column(const BlockSystem& sys, const GridPair& u, int i,
                               std::array<std::span<double>, kComponents> out) {
    const Mesh& m = sys.mesh();
    const int n = m.interior_rows();
    for (int a = 0; a < kComponents; ++a) {
        const ColumnBlock& blk = sys.block(a, i);
        auto ui = u.column(a, i).subspan(1, static_cast<std::size_t>(n));
        blk.A.multiply(ui, out[a]);
        if (i > 1) {
            auto left = u.column(a, i - 1);
            for (int k = 0; k < n; ++k) out[a][k] -= blk.L[k] * left[k + 1];
        }
        if (i < m.nx() - 1) {
            auto right = u.column(a, i + 1);
            for (int k = 0; k < n; ++k) out[a][k] -= blk.R[k] * right[k + 1];
        }
        for (int k = 0; k < n; ++k) out[a][k] -= blk.gstar[k];
    }
}

/// K_{a,i}(U) for one interior column, both components.
inline void residual_column(const BlockSystem& sys, const ProblemSpec& p, const GridPair& u, int i,
                            std::array<std::span<double>, kComponents> out) {
    linear_part_column(sys, u, i, out);
    const Mesh& m = sys.mesh();
    const double x = m.x(i);
    for (int j = 1; j < m.ny(); ++j) {
        const double y = m.y(j);
        const double u1 = u(0, i, j);
        const double u2 = u(1, i, j);
        out[0][j - 1] += eval_reaction(p, 0, x, y, u1, u2);
        out[1][j - 1] += eval_reaction(p, 1, x, y, u1, u2);
    }
}

/// Residuals K_{a,i}(U) = A_i U_i - L_i U_{i-1} - R_i U_{i+1} + F_i(U_i) - G*_i.
inline ColumnVectors residual(const BlockSystem& sys, const ProblemSpec& p, const GridPair& u) {
    require_same_mesh(sys.mesh(), u.mesh(), "residual");
    ColumnVectors k(sys.mesh());
    for (int i = 1; i < sys.mesh().nx(); ++i) residual_column(sys, p, u, i, {k.column(0, i), k.column(1, i)});
    return k;
}

inline double default_residual_slack(const BlockSystem& sys) {
    return 1e-10 * (1.0 + sys.gstar_norm());
}

struct OrderedPairReport {
    std::vector<NodeViolation> ordering;       ///< lower > upper
    std::vector<NodeViolation> upper_residual; ///< K(upper) < -slack
    std::vector<NodeViolation> lower_residual; ///< K(lower) > slack
    std::vector<NodeViolation> boundary;       ///< lower <= g <= upper broken on the boundary

    bool passed() const noexcept {
        return ordering.empty() && upper_residual.empty() && lower_residual.empty() &&
               boundary.empty();
    }

    std::string summary() const {
        if (passed()) return "ordered upper/lower pair verified";
        std::string s;
        auto add = [&](const char* what, const std::vector<NodeViolation>& v) {
            if (v.empty()) return;
            s += std::string(s.empty() ? "" : "; ") + what + ": " + std::to_string(v.size()) +
                 " node(s), first " + v.front().describe();
        };
        add("ordering", ordering);
        add("upper residual", upper_residual);
        add("lower residual", lower_residual);
        add("boundary", boundary);
        return s;
    }
};

/// Checks that (lower, upper) is an ordered pair of lower and upper solutions.
/// `slack` bounds the residual sign checks (default 1e-10 (1 + |G*|)) and, when given,
/// also the pointwise orderings (default 1e-10).
inline OrderedPairReport verify_ordered_pair(const BlockSystem& sys, const ProblemSpec& p,
                                             const GridPair& lower, const GridPair& upper,
                                             std::optional<double> slack = std::nullopt) {
    const Mesh& m = sys.mesh();
    require_same_mesh(m, lower.mesh(), "verify_ordered_pair");
    require_same_mesh(m, upper.mesh(), "verify_ordered_pair");
    const double res_slack = slack.value_or(default_residual_slack(sys));
    const double ord_slack = slack.value_or(1e-10);
    OrderedPairReport rep;

    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                const double gap = lower(a, i, j) - upper(a, i, j);
                if (!(gap <= ord_slack)) rep.ordering.push_back({a, i, j, gap});
                if (m.is_boundary(i, j)) {
                    const double g = sys.boundary()(a, i, j);
                    const double excess = std::max(lower(a, i, j) - g, g - upper(a, i, j));
                    if (!(excess <= ord_slack)) rep.boundary.push_back({a, i, j, excess});
                }
            }
        }
    }
    const ColumnVectors ku = residual(sys, p, upper);
    const ColumnVectors kl = residual(sys, p, lower);
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 1; i < m.nx(); ++i) {
            for (int j = 1; j < m.ny(); ++j) {
                if (!(ku(a, i, j) >= -res_slack)) rep.upper_residual.push_back({a, i, j, -ku(a, i, j)});
                if (!(kl(a, i, j) <= res_slack)) rep.lower_residual.push_back({a, i, j, kl(a, i, j)});
            }
        }
    }
    return rep;
}

} // namespace monoblock
