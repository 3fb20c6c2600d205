#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "monoblock/errors.hpp"

namespace monoblock {

/// Number of coupled components in every system handled here.
inline constexpr int kComponents = 2;

/// Uniform rectangular mesh on the closed unit square.
///
/// `nx` and `ny` count mesh intervals, so node indices run over
/// 0..nx and 0..ny and the interior is 1..nx-1 by 1..ny-1.
class Mesh {
public:
    Mesh(int nx, int ny) : nx_(nx), ny_(ny) {
        if (nx < 2 || ny < 2) {
            throw DimensionError("mesh needs nx >= 2 and ny >= 2, got nx=" + std::to_string(nx) +
                                 ", ny=" + std::to_string(ny));
        }
        hx_ = 1.0 / nx;
        hy_ = 1.0 / ny;
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }

    // i/nx rather than i*hx so the last node lands on 1 exactly.
    double x(int i) const noexcept { return static_cast<double>(i) / nx_; }
    double y(int j) const noexcept { return static_cast<double>(j) / ny_; }

    bool is_boundary(int i, int j) const noexcept {
        return i == 0 || i == nx_ || j == 0 || j == ny_;
    }

    /// Nodes per vertical line (column), boundary included.
    int column_size() const noexcept { return ny_ + 1; }
    /// Interior unknowns per column.
    int interior_rows() const noexcept { return ny_ - 1; }
    int interior_columns() const noexcept { return nx_ - 1; }
    std::size_t node_count() const noexcept {
        return static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1);
    }

    /// Nearest node to (x, y), clamped to the mesh.
    std::pair<int, int> nearest_node(double x, double y) const noexcept {
        const int i = std::clamp(static_cast<int>(std::lround(x * nx_)), 0, nx_);
        const int j = std::clamp(static_cast<int>(std::lround(y * ny_)), 0, ny_);
        return {i, j};
    }

    friend bool operator==(const Mesh& a, const Mesh& b) noexcept {
        return a.nx_ == b.nx_ && a.ny_ == b.ny_;
    }

private:
    int nx_;
    int ny_;
    double hx_;
    double hy_;
};

inline Mesh build_mesh(int nx, int ny) { return Mesh(nx, ny); }

using ScalarFunction = std::function<double(double x, double y)>;

/// Two-component mesh function. Storage is column-major by i so that
/// `column(alpha, i)` is a contiguous vertical line.
class GridPair {
public:
    explicit GridPair(const Mesh& mesh, double fill = 0.0) : mesh_(mesh) {
        for (auto& v : values_) v.assign(mesh.node_count(), fill);
    }

    GridPair(const Mesh& mesh, std::array<double, kComponents> fill) : mesh_(mesh) {
        for (int a = 0; a < kComponents; ++a) values_[a].assign(mesh.node_count(), fill[a]);
    }

    static GridPair from_functions(const Mesh& mesh, const ScalarFunction& u1,
                                   const ScalarFunction& u2) {
        GridPair g(mesh);
        for (int i = 0; i <= mesh.nx(); ++i) {
            for (int j = 0; j <= mesh.ny(); ++j) {
                g(0, i, j) = u1(mesh.x(i), mesh.y(j));
                g(1, i, j) = u2(mesh.x(i), mesh.y(j));
            }
        }
        return g;
    }

    const Mesh& mesh() const noexcept { return mesh_; }

    double& operator()(int alpha, int i, int j) noexcept { return values_[alpha][index(i, j)]; }
    double operator()(int alpha, int i, int j) const noexcept {
        return values_[alpha][index(i, j)];
    }

    std::span<double> column(int alpha, int i) noexcept {
        return {values_[alpha].data() + index(i, 0),
                static_cast<std::size_t>(mesh_.column_size())};
    }
    std::span<const double> column(int alpha, int i) const noexcept {
        return {values_[alpha].data() + index(i, 0),
                static_cast<std::size_t>(mesh_.column_size())};
    }

    std::span<double> values(int alpha) noexcept { return values_[alpha]; }
    std::span<const double> values(int alpha) const noexcept { return values_[alpha]; }

    bool all_finite() const noexcept {
        for (const auto& v : values_) {
            for (double x : v) {
                if (!std::isfinite(x)) return false;
            }
        }
        return true;
    }

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(mesh_.column_size()) +
               static_cast<std::size_t>(j);
    }

    Mesh mesh_;
    std::array<std::vector<double>, kComponents> values_;
};

inline void require_same_mesh(const Mesh& a, const Mesh& b, const char* where) {
    if (!(a == b)) {
        throw ShapeMismatchError(std::string(where) + ": mesh " + std::to_string(a.nx()) + "x" +
                                 std::to_string(a.ny()) + " vs " + std::to_string(b.nx()) + "x" +
                                 std::to_string(b.ny()));
    }
}

/// max over components and nodes of |a - b|.
inline double max_norm_diff(const GridPair& a, const GridPair& b) {
    require_same_mesh(a.mesh(), b.mesh(), "max_norm_diff");
    double m = 0.0;
    for (int alpha = 0; alpha < kComponents; ++alpha) {
        auto va = a.values(alpha);
        auto vb = b.values(alpha);
        for (std::size_t k = 0; k < va.size(); ++k) m = std::max(m, std::abs(va[k] - vb[k]));
    }
    return m;
}

inline double max_norm(const GridPair& a) {
    double m = 0.0;
    for (int alpha = 0; alpha < kComponents; ++alpha) {
        for (double x : a.values(alpha)) m = std::max(m, std::abs(x));
    }
    return m;
}

/// One offending node of a pointwise comparison.
struct NodeViolation {
    int alpha = 0;
    int i = 0;
    int j = 0;
    double excess = 0.0; ///< amount by which the inequality failed

    std::string describe() const {
        char buf[160];
        std::snprintf(buf, sizeof buf, "component %d at node (%d,%d) by %.3e", alpha + 1, i, j,
                      excess);
        return buf;
    }
};

/// First node where a > b + slack, scanning component, then i, then j.
inline std::optional<NodeViolation> first_leq_violation(const GridPair& a, const GridPair& b,
                                                        double slack) {
    require_same_mesh(a.mesh(), b.mesh(), "pointwise_leq");
    const Mesh& m = a.mesh();
    for (int alpha = 0; alpha < kComponents; ++alpha) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                const double excess = a(alpha, i, j) - b(alpha, i, j);
                if (!(excess <= slack)) return NodeViolation{alpha, i, j, excess};
            }
        }
    }
    return std::nullopt;
}

/// True iff a <= b + slack at every node of both components.
inline bool pointwise_leq(const GridPair& a, const GridPair& b, double slack = 0.0) {
    return !first_leq_violation(a, b, slack).has_value();
}

/// Writes one component as `x,y,value`, j outer and i inner, 17 significant digits.
inline void write_component_csv(std::ostream& os, const GridPair& g, int alpha) {
    const Mesh& m = g.mesh();
    os << "x,y,value\n";
    char buf[96];
    for (int j = 0; j <= m.ny(); ++j) {
        for (int i = 0; i <= m.nx(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", m.x(i), m.y(j), g(alpha, i, j));
            os << buf;
        }
    }
}

/// Scalar function that returns the value of `values` at the nearest node.
/// Used to turn grid data (e.g. a computed c bound) back into an evaluator.
inline ScalarFunction nearest_node_lookup(const Mesh& mesh, std::vector<double> values) {
    return [mesh, v = std::move(values)](double x, double y) {
        auto [i, j] = mesh.nearest_node(x, y);
        return v[static_cast<std::size_t>(i) * static_cast<std::size_t>(mesh.column_size()) +
                 static_cast<std::size_t>(j)];
    };
}

inline ScalarFunction nearest_node_lookup(const GridPair& g, int alpha) {
    auto vals = g.values(alpha);
    return nearest_node_lookup(g.mesh(), std::vector<double>(vals.begin(), vals.end()));
}

} // namespace monoblock
