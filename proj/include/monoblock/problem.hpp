#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"

namespace monoblock {

/// Declared sign of a convection coefficient over the whole domain.
enum class SignClass { nonnegative, nonpositive, mixed };

inline std::string_view to_string(SignClass s) {
    switch (s) {
    case SignClass::nonnegative: return "nonnegative";
    case SignClass::nonpositive: return "nonpositive";
    case SignClass::mixed: return "mixed";
    }
    return "?";
}

using ReactionFunction = std::function<double(double x, double y, double u1, double u2)>;

/// Partial derivatives of the reaction pair at a point, laid out as
/// {df1/du1, df1/du2, df2/du1, df2/du2}.
using ReactionJacobian =
    std::function<std::array<double, 4>(double x, double y, double u1, double u2)>;

inline ScalarFunction constant_function(double value) {
    return [value](double, double) { return value; };
}

/// A coupled two-component problem
///
///   -eps_a (u_a,xx + u_a,yy) + v_a (u_a,x + u_a,y) + f_a(x, y, u1, u2) = 0   in the unit square,
///   u_a = g_a                                                                on its boundary,
///
/// together with the user-supplied bounds c_a >= df_a/du_a on the working sector.
/// Reactions must be quasimonotone nondecreasing (df_a/du_b <= 0 for b != a).
struct ProblemSpec {
    std::string name = "custom";
    std::array<double, kComponents> eps{1.0, 1.0};
    std::array<ScalarFunction, kComponents> convection{constant_function(0.0),
                                                       constant_function(0.0)};
    std::array<SignClass, kComponents> convection_sign{SignClass::nonnegative,
                                                       SignClass::nonnegative};
    std::array<ReactionFunction, kComponents> reaction;
    std::array<ScalarFunction, kComponents> cbound{constant_function(0.0), constant_function(0.0)};
    std::array<ScalarFunction, kComponents> boundary;
    /// Optional analytic derivatives; finite differences are used when empty.
    ReactionJacobian reaction_jacobian;
};

namespace detail {

[[noreturn]] inline void throw_nonfinite(const char* what, int alpha, double x, double y,
                                         double value) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s_%d evaluated to %g at (x=%.6g, y=%.6g)", what, alpha + 1,
                  value, x, y);
    throw EvaluationError(buf);
}

inline double checked(double value, const char* what, int alpha, double x, double y) {
    if (!std::isfinite(value)) throw_nonfinite(what, alpha, x, y, value);
    return value;
}

} // namespace detail

inline double eval_reaction(const ProblemSpec& p, int alpha, double x, double y, double u1,
                            double u2) {
    return detail::checked(p.reaction[alpha](x, y, u1, u2), "f", alpha, x, y);
}

inline double eval_cbound(const ProblemSpec& p, int alpha, double x, double y) {
    return detail::checked(p.cbound[alpha](x, y), "c", alpha, x, y);
}

inline double eval_convection(const ProblemSpec& p, int alpha, double x, double y) {
    return detail::checked(p.convection[alpha](x, y), "v", alpha, x, y);
}

inline double eval_boundary(const ProblemSpec& p, int alpha, double x, double y) {
    return detail::checked(p.boundary[alpha](x, y), "g", alpha, x, y);
}

/// Reaction derivatives at a point: analytic if provided, else central differences.
inline std::array<double, 4> reaction_derivatives(const ProblemSpec& p, double x, double y,
                                                  double u1, double u2) {
    if (p.reaction_jacobian) return p.reaction_jacobian(x, y, u1, u2);
    std::array<double, 4> d{};
    const double h1 = 1e-6 * (1.0 + std::abs(u1));
    const double h2 = 1e-6 * (1.0 + std::abs(u2));
    for (int a = 0; a < kComponents; ++a) {
        d[2 * a] = (eval_reaction(p, a, x, y, u1 + h1, u2) - eval_reaction(p, a, x, y, u1 - h1, u2)) /
                   (2.0 * h1);
        d[2 * a + 1] =
            (eval_reaction(p, a, x, y, u1, u2 + h2) - eval_reaction(p, a, x, y, u1, u2 - h2)) /
            (2.0 * h2);
    }
    return d;
}

/// Checks the problem-level invariants on a mesh: eps > 0, c >= 0 at every node,
/// evaluators present, and declared convection signs consistent with sampled v.
inline void validate_problem(const Mesh& mesh, const ProblemSpec& p) {
    for (int a = 0; a < kComponents; ++a) {
        if (!(p.eps[a] > 0.0)) {
            throw PreconditionError("eps_" + std::to_string(a + 1) + " must be positive");
        }
        if (!p.reaction[a] || !p.boundary[a] || !p.cbound[a] || !p.convection[a]) {
            throw PreconditionError("problem '" + p.name + "' is missing an evaluator for component " +
                                    std::to_string(a + 1));
        }
    }
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= mesh.nx(); ++i) {
            for (int j = 0; j <= mesh.ny(); ++j) {
                const double x = mesh.x(i);
                const double y = mesh.y(j);
                const double c = eval_cbound(p, a, x, y);
                if (c < 0.0) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "c_%d = %g < 0 at node (%d,%d)", a + 1, c, i, j);
                    throw PreconditionError(buf);
                }
                const double v = eval_convection(p, a, x, y);
                const bool bad = (p.convection_sign[a] == SignClass::nonnegative && v < 0.0) ||
                                 (p.convection_sign[a] == SignClass::nonpositive && v > 0.0);
                if (bad) {
                    char buf[200];
                    std::snprintf(buf, sizeof buf,
                                  "v_%d = %g at node (%d,%d) contradicts declared sign class %s",
                                  a + 1, v, i, j, std::string(to_string(p.convection_sign[a])).c_str());
                    throw PreconditionError(buf);
                }
            }
        }
    }
}

/// Gamma_a(U) = c_a U_a - f_a(U) at every node. Nondecreasing in U on a sector
/// where the c bounds and quasimonotonicity hold.
inline GridPair gamma(const ProblemSpec& p, const GridPair& u) {
    const Mesh& m = u.mesh();
    GridPair out(m);
    for (int i = 0; i <= m.nx(); ++i) {
        for (int j = 0; j <= m.ny(); ++j) {
            const double x = m.x(i);
            const double y = m.y(j);
            const double u1 = u(0, i, j);
            const double u2 = u(1, i, j);
            for (int a = 0; a < kComponents; ++a) {
                out(a, i, j) = eval_cbound(p, a, x, y) * u(a, i, j) - eval_reaction(p, a, x, y, u1, u2);
            }
        }
    }
    return out;
}

/// An ordered pair of grids bounding a working sector.
struct SectorSample {
    GridPair lower;
    GridPair upper;

    SectorSample(GridPair lo, GridPair up) : lower(std::move(lo)), upper(std::move(up)) {
        if (auto v = first_leq_violation(lower, upper, 0.0)) {
            throw PreconditionError("sector lower exceeds upper: " + v->describe());
        }
    }
};

enum class SectorCondition {
    c_bound,      ///< df_a/du_a exceeded c_a
    quasimonotone ///< df_a/du_b > 0 for b != a
};

struct SectorViolation {
    SectorCondition condition;
    int alpha;
    int i;
    int j;
    double u1;
    double u2;
    double derivative; ///< the offending finite-difference estimate
    double limit;      ///< c_a for c_bound, 0 for quasimonotone
};

struct SectorReport {
    std::vector<SectorViolation> violations;
    std::size_t points_checked = 0;

    bool passed() const noexcept { return violations.empty(); }

    std::string summary(std::size_t max_items = 5) const {
        if (passed()) return "sector conditions hold at " + std::to_string(points_checked) + " points";
        std::string s = std::to_string(violations.size()) + " sector violation(s):";
        for (std::size_t k = 0; k < violations.size() && k < max_items; ++k) {
            const auto& v = violations[k];
            char buf[220];
            std::snprintf(buf, sizeof buf, "\n  %s f_%d at node (%d,%d), u=(%.4g,%.4g): %.6g vs %.6g",
                          v.condition == SectorCondition::c_bound ? "c-bound" : "quasimonotone",
                          v.alpha + 1, v.i, v.j, v.u1, v.u2, v.derivative, v.limit);
            s += buf;
        }
        return s;
    }
};

inline constexpr double kDerivativeTolerance = 1e-6;

/// Samples `samples_per_node`^2 points of the sector box at every node and checks
///   df_a/du_a <= c_a + tol   and   -df_a/du_b >= -tol
/// with central differences of step 1e-6 (1 + |u|).
inline SectorReport check_sector_conditions(const ProblemSpec& p, const SectorSample& s,
                                            int samples_per_node,
                                            double tol_deriv = kDerivativeTolerance) {
    if (samples_per_node < 2) throw PreconditionError("samples_per_node must be >= 2");
    const Mesh& m = s.lower.mesh();
    require_same_mesh(m, s.upper.mesh(), "check_sector_conditions");
    SectorReport report;

    auto f = [&](int a, double x, double y, double u1, double u2) {
        return eval_reaction(p, a, x, y, u1, u2);
    };

    for (int i = 0; i <= m.nx(); ++i) {
        for (int j = 0; j <= m.ny(); ++j) {
            const double x = m.x(i);
            const double y = m.y(j);
            const std::array<double, 2> c{eval_cbound(p, 0, x, y), eval_cbound(p, 1, x, y)};
            for (int k1 = 0; k1 < samples_per_node; ++k1) {
                const double t1 = static_cast<double>(k1) / (samples_per_node - 1);
                const double u1 = s.lower(0, i, j) + t1 * (s.upper(0, i, j) - s.lower(0, i, j));
                for (int k2 = 0; k2 < samples_per_node; ++k2) {
                    const double t2 = static_cast<double>(k2) / (samples_per_node - 1);
                    const double u2 = s.lower(1, i, j) + t2 * (s.upper(1, i, j) - s.lower(1, i, j));
                    const double h1 = 1e-6 * (1.0 + std::abs(u1));
                    const double h2 = 1e-6 * (1.0 + std::abs(u2));
                    ++report.points_checked;
                    for (int a = 0; a < kComponents; ++a) {
                        const double d_du1 =
                            (f(a, x, y, u1 + h1, u2) - f(a, x, y, u1 - h1, u2)) / (2.0 * h1);
                        const double d_du2 =
                            (f(a, x, y, u1, u2 + h2) - f(a, x, y, u1, u2 - h2)) / (2.0 * h2);
                        const double self = a == 0 ? d_du1 : d_du2;
                        const double cross = a == 0 ? d_du2 : d_du1;
                        if (self > c[a] + tol_deriv) {
                            report.violations.push_back(
                                {SectorCondition::c_bound, a, i, j, u1, u2, self, c[a]});
                        }
                        if (-cross < -tol_deriv) {
                            report.violations.push_back(
                                {SectorCondition::quasimonotone, a, i, j, u1, u2, cross, 0.0});
                        }
                    }
                }
            }
        }
    }
    return report;
}

// Built-in models ------------------------------------------------------------

inline constexpr std::array<std::string_view, 2> kRegisteredModels{"gas-liquid", "linear"};

inline bool is_registered_model(std::string_view name) {
    for (auto m : kRegisteredModels) {
        if (m == name) return true;
    }
    return false;
}

/// Convection-diffusion problem with f == 0 and c == 0.
inline ProblemSpec linear_problem(std::array<double, kComponents> eps,
                                  std::array<ScalarFunction, kComponents> boundary,
                                  std::array<ScalarFunction, kComponents> convection =
                                      {constant_function(0.0), constant_function(0.0)},
                                  std::array<SignClass, kComponents> sign =
                                      {SignClass::nonnegative, SignClass::nonnegative}) {
    ProblemSpec p;
    p.name = "linear";
    p.eps = eps;
    p.convection = std::move(convection);
    p.convection_sign = sign;
    p.boundary = std::move(boundary);
    p.reaction = {[](double, double, double, double) { return 0.0; },
                  [](double, double, double, double) { return 0.0; }};
    p.reaction_jacobian = [](double, double, double, double) {
        return std::array<double, 4>{0.0, 0.0, 0.0, 0.0};
    };
    return p;
}

/// Second-order gas-liquid reaction in shifted variables u1 = rho1 - z1, u2 = z2:
///   f1 = -sigma1 (rho1 - u1) u2,   f2 = sigma2 (rho1 - u1) u2,   sigma2 = k1 sigma1.
inline void set_gas_liquid_reaction(ProblemSpec& p, double sigma1, double k1, double rho1) {
    const double sigma2 = k1 * sigma1;
    p.reaction = {
        [=](double, double, double u1, double u2) { return -sigma1 * (rho1 - u1) * u2; },
        [=](double, double, double u1, double u2) { return sigma2 * (rho1 - u1) * u2; }};
    p.reaction_jacobian = [=](double, double, double u1, double u2) {
        return std::array<double, 4>{sigma1 * u2, -sigma1 * (rho1 - u1), -sigma2 * u2,
                                     sigma2 * (rho1 - u1)};
    };
}

} // namespace monoblock
