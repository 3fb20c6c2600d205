#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "monoblock/discretization.hpp"
#include "monoblock/errors.hpp"
#include "monoblock/linear_solver.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/problem.hpp"

namespace monoblock {

namespace detail {

/// Collects offending nodes and throws one PreconditionError naming the first few.
class NodeComplaints {
public:
    explicit NodeComplaints(std::string context) : context_(std::move(context)) {}

    void add(const char* what, int alpha, int i, int j, double value) {
        ++count_;
        if (listed_.size() < 5) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s_%d = %.6g at node (%d,%d)", what, alpha + 1, value, i, j);
            listed_.emplace_back(buf);
        }
    }

    void throw_if_any() const {
        if (count_ == 0) return;
        std::string msg = context_ + ": " + std::to_string(count_) + " offending node(s)";
        for (const auto& s : listed_) msg += "; " + s;
        throw PreconditionError(msg);
    }

private:
    std::string context_;
    std::vector<std::string> listed_;
    std::size_t count_ = 0;
};

inline void require_nonnegative_boundary(const BlockSystem& sys, NodeComplaints& bad) {
    const Mesh& m = sys.mesh();
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                if (m.is_boundary(i, j) && sys.boundary()(a, i, j) < 0.0) {
                    bad.add("g", a, i, j, sys.boundary()(a, i, j));
                }
            }
        }
    }
}

} // namespace detail

/// The zero grid as a lower solution; requires f(x, y, 0, 0) <= 0 at every node and g >= 0.
inline GridPair lower_zero(const BlockSystem& sys, const ProblemSpec& p) {
    const Mesh& m = sys.mesh();
    detail::NodeComplaints bad("lower_zero precondition (f(.,0,0) <= 0, g >= 0)");
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                const double f0 = eval_reaction(p, a, m.x(i), m.y(j), 0.0, 0.0);
                if (f0 > 0.0) bad.add("f", a, i, j, f0);
            }
        }
    }
    detail::require_nonnegative_boundary(sys, bad);
    bad.throw_if_any();

    GridPair zero(m);
    const ColumnVectors k = residual(sys, p, zero);
    if (k.max_value() > default_residual_slack(sys)) {
        throw PreconditionError("lower_zero: residual of the zero grid is positive");
    }
    return zero;
}

/// Upper solution from a lower bound f_a >= -M_a (u >= 0): solves L_h U = M with U = g.
/// The bound is spot-checked on a 5 x 5 lattice of u in [0, max U]^2 at every node.
inline GridPair upper_from_bound(const BlockSystem& sys, const ProblemSpec& p,
                                 std::array<double, kComponents> M) {
    const Mesh& m = sys.mesh();
    for (double v : M) {
        if (!(v >= 0.0)) throw PreconditionError("upper_from_bound: M must be nonnegative");
    }
    detail::NodeComplaints neg_g("upper_from_bound precondition (g >= 0)");
    detail::require_nonnegative_boundary(sys, neg_g);
    neg_g.throw_if_any();

    GridPair phi(m, M);
    GridPair upper = solve_linear(sys, GridPair(m), phi, LinearSolveOptions{1e-12, 0});

    std::array<double, kComponents> umax{};
    for (int a = 0; a < kComponents; ++a) {
        for (double v : upper.values(a)) umax[a] = std::max(umax[a], v);
    }
    constexpr int kLattice = 5;
    detail::NodeComplaints bad("upper_from_bound premise f >= -M");
    for (int i = 0; i <= m.nx(); ++i) {
        for (int j = 0; j <= m.ny(); ++j) {
            for (int s1 = 0; s1 < kLattice; ++s1) {
                for (int s2 = 0; s2 < kLattice; ++s2) {
                    const double u1 = umax[0] * s1 / (kLattice - 1);
                    const double u2 = umax[1] * s2 / (kLattice - 1);
                    for (int a = 0; a < kComponents; ++a) {
                        const double f = eval_reaction(p, a, m.x(i), m.y(j), u1, u2);
                        if (f < -M[a]) bad.add("f", a, i, j, f);
                    }
                }
            }
        }
    }
    bad.throw_if_any();

    if (residual(sys, p, upper).min_value() < -default_residual_slack(sys)) {
        throw PreconditionError("upper_from_bound: constructed grid is not an upper solution");
    }
    return upper;
}

/// Constant upper solution K; requires f(x, y, K) >= 0 at every node and g <= K.
inline GridPair upper_constant(const BlockSystem& sys, const ProblemSpec& p,
                               std::array<double, kComponents> K) {
    const Mesh& m = sys.mesh();
    detail::NodeComplaints bad("upper_constant precondition (f(.,K) >= 0, g <= K)");
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                const double fk = eval_reaction(p, a, m.x(i), m.y(j), K[0], K[1]);
                if (fk < 0.0) bad.add("f", a, i, j, fk);
                if (m.is_boundary(i, j) && sys.boundary()(a, i, j) > K[a]) {
                    bad.add("g", a, i, j, sys.boundary()(a, i, j));
                }
            }
        }
    }
    bad.throw_if_any();
    return GridPair(m, K);
}

// Gas-liquid interaction model -------------------------------------------------

/// Dissolved gas A reacting with dissolved reactant B (A + k1 B -> P) in shifted
/// variables u1 = rho1 - [A], u2 = [B].
struct GasLiquidParams {
    double sigma1 = 1.0; ///< rate constant
    double k1 = 1.0;     ///< stoichiometric constant, sigma2 = k1 sigma1
    double rho1 = 1.0;   ///< shift, must dominate g1star on the boundary
    std::array<double, kComponents> eps{1.0, 1.0};
    ScalarFunction g1star = constant_function(0.0);
    ScalarFunction g2 = constant_function(1.0);
    std::array<ScalarFunction, kComponents> convection{constant_function(0.0), constant_function(0.0)};
    std::array<SignClass, kComponents> convection_sign{SignClass::nonnegative, SignClass::nonnegative};

    double sigma2() const noexcept { return k1 * sigma1; }
};

/// Problem, assembled system and a verified initial pair with matching c bounds.
struct InitialSetup {
    ProblemSpec problem;
    BlockSystem system;
    GridPair lower;
    GridPair upper;
};

inline ProblemSpec gas_liquid_problem(const GasLiquidParams& gp) {
    if (!(gp.sigma1 > 0.0 && gp.k1 > 0.0 && gp.rho1 > 0.0)) {
        throw PreconditionError("gas-liquid: sigma1, k1 and rho1 must be positive");
    }
    ProblemSpec p;
    p.name = "gas-liquid";
    p.eps = gp.eps;
    p.convection = gp.convection;
    p.convection_sign = gp.convection_sign;
    p.boundary = {gp.g1star, gp.g2};
    set_gas_liquid_reaction(p, gp.sigma1, gp.k1, gp.rho1);
    return p;
}

namespace detail {

inline void check_gas_liquid_boundary(const GasLiquidParams& gp, const BlockSystem& sys) {
    const Mesh& m = sys.mesh();
    NodeComplaints bad("gas-liquid parameters (g1* <= rho1, g1* >= 0, g2 >= 0)");
    for (int i = 0; i <= m.nx(); ++i) {
        for (int j = 0; j <= m.ny(); ++j) {
            if (!m.is_boundary(i, j)) continue;
            const double g1 = sys.boundary()(0, i, j);
            const double g2 = sys.boundary()(1, i, j);
            if (g1 > gp.rho1 || g1 < 0.0) bad.add("g", 0, i, j, g1);
            if (g2 < 0.0) bad.add("g", 1, i, j, g2);
        }
    }
    bad.throw_if_any();
}

} // namespace detail

/// Solves L_h W_1 = 0 (W_1 = g1*) and L_h W_2 = 0 (W_2 = g2); returns
/// lower = (W_1, 0), upper = (rho1, W_2) and c = (sigma1 W_2, sigma2 rho1).
inline InitialSetup gas_liquid_initials(const GasLiquidParams& gp, const Mesh& mesh) {
    ProblemSpec p = gas_liquid_problem(gp);
    BlockSystem sys = assemble(mesh, p);
    detail::check_gas_liquid_boundary(gp, sys);

    GridPair w = solve_linear(sys, GridPair(mesh), GridPair(mesh), LinearSolveOptions{1e-12, 0});
    constexpr double kRoundoff = 1e-12;
    detail::NodeComplaints bad("gas-liquid maximum-principle bounds (W1 <= rho1, W2 >= 0)");
    for (int i = 0; i <= mesh.nx(); ++i) {
        for (int j = 0; j <= mesh.ny(); ++j) {
            if (w(0, i, j) > gp.rho1 + kRoundoff) bad.add("W", 0, i, j, w(0, i, j));
            if (w(1, i, j) < -kRoundoff) bad.add("W", 1, i, j, w(1, i, j));
            // strip roundoff so the pair is ordered exactly
            w(0, i, j) = std::min(w(0, i, j), gp.rho1);
            w(1, i, j) = std::max(w(1, i, j), 0.0);
        }
    }
    bad.throw_if_any();

    GridPair lower(mesh);
    GridPair upper(mesh);
    for (int i = 0; i <= mesh.nx(); ++i) {
        for (int j = 0; j <= mesh.ny(); ++j) {
            lower(0, i, j) = w(0, i, j);
            lower(1, i, j) = 0.0;
            upper(0, i, j) = gp.rho1;
            upper(1, i, j) = w(1, i, j);
        }
    }
    GridPair c1(mesh);
    for (int i = 0; i <= mesh.nx(); ++i) {
        for (int j = 0; j <= mesh.ny(); ++j) c1(0, i, j) = gp.sigma1 * w(1, i, j);
    }
    p.cbound = {nearest_node_lookup(c1, 0), constant_function(gp.sigma2() * gp.rho1)};
    return {std::move(p), std::move(sys), std::move(lower), std::move(upper)};
}

/// Constant-pair construction for the gas-liquid model: lower = 0,
/// upper = K = (rho1, max g2 on the boundary), c = (sigma1 K2, sigma2 rho1).
inline InitialSetup gas_liquid_constant_initials(const GasLiquidParams& gp, const Mesh& mesh) {
    ProblemSpec p = gas_liquid_problem(gp);
    BlockSystem sys = assemble(mesh, p);
    detail::check_gas_liquid_boundary(gp, sys);
    double g2max = 0.0;
    for (int i = 0; i <= mesh.nx(); ++i) {
        for (int j = 0; j <= mesh.ny(); ++j) {
            if (mesh.is_boundary(i, j)) g2max = std::max(g2max, sys.boundary()(1, i, j));
        }
    }
    const std::array<double, kComponents> K{gp.rho1, g2max};
    p.cbound = {constant_function(gp.sigma1 * K[1]), constant_function(gp.sigma2() * gp.rho1)};
    GridPair lower = lower_zero(sys, p);
    GridPair upper = upper_constant(sys, p, K);
    return {std::move(p), std::move(sys), std::move(lower), std::move(upper)};
}

} // namespace monoblock
