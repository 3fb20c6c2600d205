#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monoblock/discretization.hpp"
#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/problem.hpp"
#include "monoblock/tridiagonal.hpp"

namespace monoblock {

enum class Method { jacobi, gs_left, gs_right };
enum class SweepDirection { left, right };

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::jacobi: return "jacobi";
    case Method::gs_left: return "gs_left";
    case Method::gs_right: return "gs_right";
    }
    return "?";
}

struct SolverConfig {
    Method method = Method::jacobi;
    /// Target for the estimated distance of both iterates to their limits (max norm).
    double tol = 1e-10;
    int max_iter = 10000;
    /// Check lower_{n-1} <= lower_n <= upper_n <= upper_{n-1} after every step.
    bool enforce_monotone = true;
    double ordering_slack = 1e-11;
};

/// Per-step record of a monotone run. All vectors have one entry per step taken.
struct IterationTrace {
    std::vector<double> znorm_upper;
    std::vector<double> znorm_lower;
    std::vector<double> res_upper;
    std::vector<double> res_lower;
    std::vector<double> millis;

    std::size_t size() const noexcept { return znorm_upper.size(); }

    void write_csv(std::ostream& os) const {
        os << "n,znorm_upper,znorm_lower,res_upper,res_lower,millis\n";
        char buf[200];
        for (std::size_t k = 0; k < size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.6f\n", k + 1, znorm_upper[k],
                          znorm_lower[k], res_upper[k], res_lower[k], millis[k]);
            os << buf;
        }
    }
};

/// Limits of the upper and lower sequences.
struct SolutionPair {
    GridPair maximal;
    GridPair minimal;
    int iterations = 0;
    bool converged = false;
};

struct MonotoneRun {
    SolutionPair solution;
    IterationTrace trace;
};

/// Diagonal blocks C_i: c_a evaluated once at every node.
inline GridPair build_c_grid(const Mesh& mesh, const ProblemSpec& p) {
    GridPair c(mesh);
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= mesh.nx(); ++i) {
            for (int j = 0; j <= mesh.ny(); ++j) c(a, i, j) = eval_cbound(p, a, mesh.x(i), mesh.y(j));
        }
    }
    return c;
}

/// Whether a Gauss-Seidel sweep in `dir` is justified by the convection signs:
/// left needs v >= 0, right needs v <= 0, and v == 0 admits both.
inline bool direction_admissible(const BlockSystem& sys, SweepDirection dir) {
    for (int a = 0; a < kComponents; ++a) {
        if (sys.zero_convection(a)) continue;
        const SignClass want = dir == SweepDirection::left ? SignClass::nonnegative : SignClass::nonpositive;
        if (sys.sign(a) != want) return false;
    }
    return true;
}

inline std::optional<SweepDirection> admissible_direction(const BlockSystem& sys) {
    if (direction_admissible(sys, SweepDirection::left)) return SweepDirection::left;
    if (direction_admissible(sys, SweepDirection::right)) return SweepDirection::right;
    return std::nullopt;
}

namespace detail {

inline void set_boundary_to_g(const BlockSystem& sys, GridPair& u) {
    const Mesh& m = sys.mesh();
    for (int a = 0; a < kComponents; ++a) {
        for (int i = 0; i <= m.nx(); ++i) {
            for (int j = 0; j <= m.ny(); ++j) {
                if (m.is_boundary(i, j)) u(a, i, j) = sys.boundary()(a, i, j);
            }
        }
    }
}

struct StepWorkspace {
    std::array<std::vector<double>, kComponents> k;
    std::vector<double> rhs, shift, scratch, z;
    std::array<std::vector<double>, kComponents> z_neighbor;

    explicit StepWorkspace(int n) : rhs(n), shift(n), scratch(n), z(n) {
        for (auto& v : k) v.assign(n, 0.0);
        for (auto& v : z_neighbor) v.assign(n, 0.0);
    }
};

/// Solves (A_i + C_i) Z = -K_i(u_prev) + coupling * z_neighbor for column i, both
/// components, and writes u_prev + Z into `next`. `coupling` selects L, R, or none.
enum class Coupling { none, left, right };

inline void column_update(const BlockSystem& sys, const ProblemSpec& p, const GridPair& c,
                          const GridPair& u_prev, int i, Coupling coupling, StepWorkspace& ws,
                          GridPair& next) {
    const int n = sys.mesh().interior_rows();
    residual_column(sys, p, u_prev, i, {std::span<double>(ws.k[0]), std::span<double>(ws.k[1])});
    for (int a = 0; a < kComponents; ++a) {
        const ColumnBlock& blk = sys.block(a, i);
        for (int k = 0; k < n; ++k) {
            double s = -ws.k[a][k];
            if (coupling == Coupling::left) s += blk.L[k] * ws.z_neighbor[a][k];
            if (coupling == Coupling::right) s += blk.R[k] * ws.z_neighbor[a][k];
            ws.rhs[k] = s;
            ws.shift[k] = c(a, i, k + 1);
        }
        thomas_solve_into(blk.A, ws.shift, ws.rhs, ws.z, ws.scratch);
        auto prev = u_prev.column(a, i);
        auto out = next.column(a, i);
        for (int k = 0; k < n; ++k) out[k + 1] = prev[k + 1] + ws.z[k];
        std::copy(ws.z.begin(), ws.z.end(), ws.z_neighbor[a].begin());
    }
}

} // namespace detail

/// One block Jacobi step: every interior column solves (A_i + C_i) Z_i = -K_i(u_prev)
/// independently. On the first step the boundary of the result is set to g.
inline GridPair jacobi_step(const BlockSystem& sys, const ProblemSpec& p, const GridPair& c,
                            const GridPair& u_prev, bool is_first) {
    const Mesh& m = sys.mesh();
    require_same_mesh(m, u_prev.mesh(), "jacobi_step");
    GridPair next = u_prev;
    if (is_first) detail::set_boundary_to_g(sys, next);
    detail::StepWorkspace ws(m.interior_rows());
    for (int i = 1; i < m.nx(); ++i) {
        detail::column_update(sys, p, c, u_prev, i, detail::Coupling::none, ws, next);
    }
    return next;
}

/// One block Gauss-Seidel step. A left sweep visits i = 1..nx-1 and couples through
/// L_i Z_{i-1}; a right sweep visits i = nx-1..1 and couples through R_i Z_{i+1}.
/// The boundary increment never enters: its L/R contribution lives in G*.
inline GridPair gs_step(const BlockSystem& sys, const ProblemSpec& p, const GridPair& c,
                        const GridPair& u_prev, SweepDirection dir, bool is_first) {
    const Mesh& m = sys.mesh();
    require_same_mesh(m, u_prev.mesh(), "gs_step");
    if (!direction_admissible(sys, dir)) {
        throw DirectionError(std::string("Gauss-Seidel ") +
                             (dir == SweepDirection::left ? "left" : "right") +
                             " sweep is incompatible with convection sign classes (" +
                             std::string(to_string(sys.sign(0))) + ", " +
                             std::string(to_string(sys.sign(1))) + ")");
    }
    GridPair next = u_prev;
    if (is_first) detail::set_boundary_to_g(sys, next);
    detail::StepWorkspace ws(m.interior_rows());
    if (dir == SweepDirection::left) {
        for (int i = 1; i < m.nx(); ++i) {
            detail::column_update(sys, p, c, u_prev, i,
                                  i == 1 ? detail::Coupling::none : detail::Coupling::left, ws, next);
        }
    } else {
        for (int i = m.nx() - 1; i >= 1; --i) {
            detail::column_update(sys, p, c, u_prev, i,
                                  i == m.nx() - 1 ? detail::Coupling::none : detail::Coupling::right,
                                  ws, next);
        }
    }
    return next;
}

/// Estimates how far an iterate is from the limit of its sequence from the last
/// few step norms: |Z_n| q / (1 - q) with q the largest recent contraction ratio.
class ConvergenceMonitor {
public:
    void record(double znorm, double iterate_norm) {
        if (last_ > 0.0) {
            ratios_.push_back(znorm / last_);
            if (ratios_.size() > kWindow) ratios_.pop_front();
        }
        last_ = znorm;
        floor_ = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, iterate_norm);
        ++steps_;
    }

    double distance_estimate() const {
        if (steps_ == 0) return std::numeric_limits<double>::infinity();
        if (last_ == 0.0 || last_ <= floor_) return last_;
        if (ratios_.empty()) return std::numeric_limits<double>::infinity();
        const double q = *std::max_element(ratios_.begin(), ratios_.end());
        if (q >= 1.0) return std::numeric_limits<double>::infinity();
        return last_ * std::max(1.0, q / (1.0 - q));
    }

private:
    static constexpr std::size_t kWindow = 3;
    std::deque<double> ratios_;
    double last_ = -1.0;
    double floor_ = 0.0;
    int steps_ = 0;
};

/// Advances an upper and a lower sequence together with one step operator.
class MonotonePairIterator {
public:
    MonotonePairIterator(const BlockSystem& sys, const ProblemSpec& p, GridPair c, Method method,
                         const SolverConfig& cfg, GridPair lower0, GridPair upper0)
        : sys_(sys), p_(p), c_(std::move(c)), method_(method), cfg_(cfg), lower_(std::move(lower0)),
          upper_(std::move(upper0)), start_(std::chrono::steady_clock::now()) {}

    /// Performs one step of both sequences; returns true once converged.
    bool advance() {
        const bool first = steps_ == 0;
        GridPair up = step(upper_, first);
        GridPair lo = step(lower_, first);
        ++steps_;
        if (cfg_.enforce_monotone) check_ordering(lo, up);

        const double zu = max_norm_diff(up, upper_);
        const double zl = max_norm_diff(lo, lower_);
        upper_ = std::move(up);
        lower_ = std::move(lo);
        upper_monitor_.record(zu, max_norm(upper_));
        lower_monitor_.record(zl, max_norm(lower_));

        trace_.znorm_upper.push_back(zu);
        trace_.znorm_lower.push_back(zl);
        trace_.res_upper.push_back(residual(sys_, p_, upper_).max_abs());
        trace_.res_lower.push_back(residual(sys_, p_, lower_).max_abs());
        trace_.millis.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count());

        if (!converged_at_ && std::max(upper_monitor_.distance_estimate(),
                                       lower_monitor_.distance_estimate()) <= cfg_.tol) {
            converged_at_ = steps_;
        }
        return converged_at_.has_value();
    }

    const GridPair& upper() const noexcept { return upper_; }
    const GridPair& lower() const noexcept { return lower_; }
    const GridPair& c_grid() const noexcept { return c_; }
    const IterationTrace& trace() const noexcept { return trace_; }
    int steps() const noexcept { return steps_; }
    std::optional<int> converged_at() const noexcept { return converged_at_; }

private:
    GridPair step(const GridPair& u, bool first) const {
        switch (method_) {
        case Method::jacobi: return jacobi_step(sys_, p_, c_, u, first);
        case Method::gs_left: return gs_step(sys_, p_, c_, u, SweepDirection::left, first);
        case Method::gs_right: return gs_step(sys_, p_, c_, u, SweepDirection::right, first);
        }
        return u;
    }

    void check_ordering(const GridPair& lo, const GridPair& up) const {
        const double s = cfg_.ordering_slack;
        auto fail = [&](const char* what, const NodeViolation& v) {
            throw MonotonicityViolation(std::string(to_string(method_)) + " step " +
                                        std::to_string(steps_) + ": " + what + " broken, " +
                                        v.describe());
        };
        if (auto v = first_leq_violation(lower_, lo, s)) fail("lower_{n-1} <= lower_n", *v);
        if (auto v = first_leq_violation(lo, up, s)) fail("lower_n <= upper_n", *v);
        if (auto v = first_leq_violation(up, upper_, s)) fail("upper_n <= upper_{n-1}", *v);
    }

    const BlockSystem& sys_;
    const ProblemSpec& p_;
    GridPair c_;
    Method method_;
    SolverConfig cfg_;
    GridPair lower_;
    GridPair upper_;
    ConvergenceMonitor upper_monitor_;
    ConvergenceMonitor lower_monitor_;
    IterationTrace trace_;
    int steps_ = 0;
    std::optional<int> converged_at_;
    std::chrono::steady_clock::time_point start_;
};

namespace detail {

inline void require_ordered_start(const BlockSystem& sys, const ProblemSpec& p, const GridPair& lower0,
                                  const GridPair& upper0) {
    const OrderedPairReport rep = verify_ordered_pair(sys, p, lower0, upper0);
    if (!rep.passed()) throw PreconditionError("initial pair rejected: " + rep.summary());
}

inline void validate_config(const SolverConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw PreconditionError("solver tol must be positive");
    if (cfg.max_iter < 1) throw PreconditionError("solver max_iter must be >= 1");
    if (!(cfg.ordering_slack >= 0.0)) throw PreconditionError("ordering_slack must be nonnegative");
}

} // namespace detail

/// Runs the configured block monotone method from an ordered pair (lower0, upper0)
/// until both sequences are estimated within tol of their limits or max_iter steps.
inline MonotoneRun run_monotone(const BlockSystem& sys, const ProblemSpec& p, const SolverConfig& cfg,
                                const GridPair& lower0, const GridPair& upper0) {
    detail::validate_config(cfg);
    require_same_mesh(sys.mesh(), lower0.mesh(), "run_monotone");
    require_same_mesh(sys.mesh(), upper0.mesh(), "run_monotone");
    if (cfg.method != Method::jacobi) {
        const auto dir = cfg.method == Method::gs_left ? SweepDirection::left : SweepDirection::right;
        if (!direction_admissible(sys, dir)) {
            throw DirectionError(std::string("method ") + std::string(to_string(cfg.method)) +
                                 " is incompatible with convection sign classes (" +
                                 std::string(to_string(sys.sign(0))) + ", " +
                                 std::string(to_string(sys.sign(1))) + ")");
        }
    }
    detail::require_ordered_start(sys, p, lower0, upper0);

    MonotonePairIterator it(sys, p, build_c_grid(sys.mesh(), p), cfg.method, cfg, lower0, upper0);
    while (it.steps() < cfg.max_iter) {
        if (it.advance()) break;
    }
    MonotoneRun run{SolutionPair{it.upper(), it.lower(), it.steps(), it.converged_at().has_value()},
                    it.trace()};
    return run;
}

struct ComparisonReport {
    Method gs_method = Method::gs_left;
    int iters_jacobi = 0; ///< first step at which Jacobi met tol (steps taken if never)
    int iters_gs = 0;
    bool jacobi_converged = false;
    bool gs_converged = false;
    bool sandwich_ok = true;
    std::string first_violation; ///< empty when sandwich_ok
    int steps_compared = 0;
    MonotoneRun jacobi;
    MonotoneRun gs;

    bool gs_not_slower() const noexcept { return iters_gs <= iters_jacobi; }
};

/// Runs Jacobi and Gauss-Seidel in lockstep from the same pair and checks
///   lower_J <= lower_GS <= upper_GS <= upper_J
/// at every common step. Throws SandwichViolation when cfg.enforce_monotone is set,
/// otherwise records the first violation in the report.
inline ComparisonReport compare_methods(const BlockSystem& sys, const ProblemSpec& p,
                                        const SolverConfig& cfg_base, const GridPair& lower0,
                                        const GridPair& upper0) {
    detail::validate_config(cfg_base);
    const auto dir = admissible_direction(sys);
    if (!dir) {
        throw DirectionError("compare_methods: mixed-sign convection admits no Gauss-Seidel direction");
    }
    detail::require_ordered_start(sys, p, lower0, upper0);

    const Method gs_method = *dir == SweepDirection::left ? Method::gs_left : Method::gs_right;
    const GridPair c = build_c_grid(sys.mesh(), p);
    MonotonePairIterator jac(sys, p, c, Method::jacobi, cfg_base, lower0, upper0);
    MonotonePairIterator gs(sys, p, c, gs_method, cfg_base, lower0, upper0);

    const double s = cfg_base.ordering_slack;
    bool sandwich_ok = true;
    std::string first_violation;
    int steps = 0;
    while (jac.steps() < cfg_base.max_iter) {
        const bool jdone = jac.advance();
        const bool gdone = gs.advance();
        ++steps;
        if (sandwich_ok) {
            std::optional<NodeViolation> v;
            const char* what = "";
            if ((v = first_leq_violation(jac.lower(), gs.lower(), s))) what = "lower_J <= lower_GS";
            else if ((v = first_leq_violation(gs.lower(), gs.upper(), s))) what = "lower_GS <= upper_GS";
            else if ((v = first_leq_violation(gs.upper(), jac.upper(), s))) what = "upper_GS <= upper_J";
            if (v) {
                sandwich_ok = false;
                first_violation = "step " + std::to_string(steps) + ": " + what + " broken, " + v->describe();
                if (cfg_base.enforce_monotone) throw SandwichViolation(first_violation);
            }
        }
        if (jdone && gdone) break;
    }
    const int iters_j = jac.converged_at().value_or(jac.steps());
    const int iters_gs = gs.converged_at().value_or(gs.steps());
    ComparisonReport rep{
        gs_method,
        iters_j,
        iters_gs,
        jac.converged_at().has_value(),
        gs.converged_at().has_value(),
        sandwich_ok,
        std::move(first_violation),
        steps,
        MonotoneRun{SolutionPair{jac.upper(), jac.lower(), iters_j, jac.converged_at().has_value()},
                    jac.trace()},
        MonotoneRun{SolutionPair{gs.upper(), gs.lower(), iters_gs, gs.converged_at().has_value()},
                    gs.trace()},
    };
    return rep;
}

} // namespace monoblock
