// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "monoblock/monoblock.hpp"
#include "monoblock/oracle.hpp"
#include "support.hpp"

using namespace monoblock;
namespace tst = monoblock::fixtures;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1, 2 ---------------------------------------------------------------------------

Outcome monotone_ordering(Method method) {
    const Mesh m(16, 16);
    const auto t0 = Clock::now();
    const InitialSetup s = gas_liquid_initials(tst::reference_gas_liquid(), m);
    SolverConfig cfg;
    cfg.method = method;
    cfg.enforce_monotone = false; // checked below, step by step
    const double slack = 1e-11;
    MonotonePairIterator it(s.system, s.problem, build_c_grid(m, s.problem), method, cfg, s.lower, s.upper);
    GridPair lo_prev = s.lower, up_prev = s.upper;
    Outcome out;
    while (it.steps() < cfg.max_iter) {
        const bool done = it.advance();
        const bool ok = pointwise_leq(lo_prev, it.lower(), slack) && pointwise_leq(it.lower(), it.upper(), slack) &&
                        pointwise_leq(it.upper(), up_prev, slack);
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = fmt("ordering broken at step %d; ", it.steps());
        }
        lo_prev = it.lower();
        up_prev = it.upper();
        if (done) break;
    }
    const double secs = seconds_since(t0);
    const bool converged = it.converged_at().has_value();
    out.pass = out.pass && converged && secs < 5.0;
    out.detail += fmt("%d steps, converged=%d, gap %.2e, %.2f s", it.steps(), converged,
                      max_norm_diff(it.upper(), it.lower()), secs);
    return out;
}

// 3 --------------------------------------------------------------------------------

Outcome sandwich() {
    const Mesh m(16, 16);
    const InitialSetup s = gas_liquid_initials(tst::reference_gas_liquid(), m);
    SolverConfig cfg;
    cfg.tol = 1e-10;
    cfg.ordering_slack = 1e-11;
    cfg.enforce_monotone = false;
    const ComparisonReport r = compare_methods(s.system, s.problem, cfg, s.lower, s.upper);
    Outcome out;
    out.pass = r.sandwich_ok && r.jacobi_converged && r.gs_converged && r.gs_not_slower();
    out.detail = fmt("iters jacobi %d, gs %d, %d lockstep steps", r.iters_jacobi, r.iters_gs, r.steps_compared);
    if (!r.sandwich_ok) out.detail += "; " + r.first_violation;
    return out;
}

// 4 --------------------------------------------------------------------------------

Outcome bracketing() {
    const Mesh m(8, 8);
    const InitialSetup s = gas_liquid_initials(tst::reference_gas_liquid(), m);
    const auto nr = oracle::newton_solve(s.system, s.problem, oracle::midpoint(s.lower, s.upper));
    Outcome out;
    for (Method method : {Method::jacobi, Method::gs_left}) {
        SolverConfig cfg;
        cfg.method = method;
        const MonotoneRun run = run_monotone(s.system, s.problem, cfg, s.lower, s.upper);
        const GridPair& up = run.solution.maximal;
        const GridPair& lo = run.solution.minimal;
        bool ok = pointwise_leq(lo, nr.solution, 1e-8) && pointwise_leq(nr.solution, up, 1e-8);
        const double gap = max_norm_diff(up, lo);
        if (gap <= 1e-8) ok = ok && max_norm_diff(up, nr.solution) <= 1e-7 && max_norm_diff(lo, nr.solution) <= 1e-7;
        out.pass = out.pass && ok && run.solution.converged;
        out.detail += fmt("%s: gap %.1e, |S - max| %.1e; ", std::string(to_string(method)).c_str(), gap,
                          max_norm_diff(up, nr.solution));
    }
    out.detail += fmt("newton %d steps", nr.iterations);
    return out;
}

// 5 --------------------------------------------------------------------------------

Outcome linear_consistency() {
    std::mt19937_64 rng(505);
    Outcome out;
    double worst_engine = 0.0, worst_newton = 0.0;
    int cases = 0;
    for (int n : {2, 4, 8, 16}) {
        for (int trial = 0; trial < 3; ++trial) {
            const Mesh m(n, n);
            const ProblemSpec p = linear_problem({1.0, 1.0}, {tst::random_bilinear(rng, 2.0), tst::random_bilinear(rng, 2.0)});
            const BlockSystem sys = assemble(m, p);
            const GridPair w = solve_linear(sys, GridPair(m), GridPair(m));
            const GridPair lo = lower_zero(sys, p);
            const GridPair up = upper_from_bound(sys, p, {1.0, 1.0});
            for (Method method : {Method::jacobi, Method::gs_left, Method::gs_right}) {
                SolverConfig cfg;
                cfg.method = method;
                const MonotoneRun run = run_monotone(sys, p, cfg, lo, up);
                const double err = std::max(max_norm_diff(run.solution.maximal, w), max_norm_diff(run.solution.minimal, w));
                worst_engine = std::max(worst_engine, err);
                if (!(run.solution.converged && err <= 10 * cfg.tol)) out.pass = false;
            }
            const auto nr = oracle::newton_solve(sys, p, GridPair(m), {1e-12, 5, 1.0});
            worst_newton = std::max(worst_newton, max_norm_diff(nr.solution, w));
            if (!(max_norm_diff(nr.solution, w) <= 1e-10)) out.pass = false;
            ++cases;
        }
    }
    out.detail = fmt("%d problems up to 17x17; engine err %.1e (<= 1e-9), newton err %.1e (<= 1e-10)", cases,
                     worst_engine, worst_newton);
    return out;
}

// 6 --------------------------------------------------------------------------------

Outcome maximum_principle() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> vel(-5.0, 5.0);
    const Mesh m(8, 8);
    Outcome out;
    double min_w = 0.0, worst_excess = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        std::array<double, 2> v{vel(rng), vel(rng)};
        auto sign = [](double x) { return x >= 0 ? SignClass::nonnegative : SignClass::nonpositive; };
        const ProblemSpec p = linear_problem({0.5, 1.0}, {tst::random_bilinear(rng), tst::random_bilinear(rng)},
                                             {constant_function(v[0]), constant_function(v[1])}, {sign(v[0]), sign(v[1])});
        const BlockSystem sys = assemble(m, p);
        const GridPair cstar = tst::random_grid(m, rng, 0.05, 5.0);
        const GridPair phi = tst::random_grid(m, rng, 0.0, 10.0);
        const GridPair w = solve_linear(sys, cstar, phi);
        for (int a = 0; a < 2; ++a) {
            double bound = 0.0, norm = 0.0;
            for (int i = 0; i <= m.nx(); ++i) {
                for (int j = 0; j <= m.ny(); ++j) {
                    min_w = std::min(min_w, w(a, i, j));
                    norm = std::max(norm, std::abs(w(a, i, j)));
                    bound = std::max(bound, m.is_boundary(i, j) ? std::abs(sys.boundary()(a, i, j))
                                                                 : std::abs(phi(a, i, j) / cstar(a, i, j)));
                }
            }
            worst_excess = std::max(worst_excess, norm - bound);
            if (norm > bound + 1e-10) out.pass = false;
        }
    }
    if (min_w < -1e-12) out.pass = false;
    out.detail = fmt("min W %.1e, max(|W| - bound) %.1e", min_w, worst_excess);
    return out;
}

// 7 --------------------------------------------------------------------------------

Outcome gamma_monotone() {
    const Mesh m(8, 8);
    const InitialSetup s = gas_liquid_initials(tst::reference_gas_liquid(), m);
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> t(0.0, 1.0);
    Outcome out;
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
        GridPair V(m), U(m);
        for (int a = 0; a < 2; ++a) {
            for (std::size_t k = 0; k < V.values(a).size(); ++k) {
                const double lo = s.lower.values(a)[k], hi = s.upper.values(a)[k];
                const double p = lo + t(rng) * (hi - lo);
                V.values(a)[k] = p;
                U.values(a)[k] = p + t(rng) * (hi - p);
            }
        }
        const GridPair gu = gamma(s.problem, U), gv = gamma(s.problem, V);
        for (int a = 0; a < 2; ++a) {
            for (std::size_t k = 0; k < gu.values(a).size(); ++k) {
                worst = std::max(worst, gv.values(a)[k] - gu.values(a)[k]);
            }
        }
    }
    out.pass = worst <= 1e-8;
    out.detail = fmt("1000 pairs, max(Gamma(V) - Gamma(U)) = %.1e", worst);
    return out;
}

// 8 --------------------------------------------------------------------------------

Outcome stencil_structure() {
    std::mt19937_64 rng(808);
    Outcome out;
    int configs = 0;
    for (double eps : {1.0, 0.1, 0.01}) {
        for (double v : {0.0, 1.0, -1.0, 10.0, -10.0}) {
            for (int n : {4, 16}) {
                const Mesh m(n, n);
                const SignClass s = v >= 0 ? SignClass::nonnegative : SignClass::nonpositive;
                const ProblemSpec p = linear_problem({eps, eps}, {constant_function(0.0), constant_function(0.0)},
                                                     {constant_function(v), constant_function(v)}, {s, s});
                const BlockSystem sys = assemble(m, p);
                const StencilCoefficients& c = sys.coefficients();
                const GridPair cgrid = tst::random_grid(m, rng, 0.0, 10.0);
                const double h = m.hx();
                for (int a = 0; a < 2; ++a) {
                    for (int i = 1; i < n; ++i) {
                        const ColumnBlock& blk = sys.block(a, i);
                        for (int j = 1; j < n; ++j) {
                            const double l = c.l(a, i, j), r = c.r(a, i, j), b = c.b(a, i, j), t = c.t(a, i, j);
                            if (c.d(a, i, j) != l + r + b + t) out.pass = false;
                            const double diff = eps / (h * h), conv = std::abs(v) / h;
                            const double el = diff + (v >= 0 ? conv : 0.0), er = diff + (v < 0 ? conv : 0.0);
                            if (std::abs(l - el) > 1e-12 * el || std::abs(r - er) > 1e-12 * er ||
                                std::abs(b - el) > 1e-12 * el || std::abs(t - er) > 1e-12 * er) {
                                out.pass = false;
                            }
                            const std::size_t k = static_cast<std::size_t>(j - 1);
                            const double diag = blk.A.diag[k] + cgrid(a, i, j);
                            if (!(blk.A.sub[k] <= 0.0 && blk.A.super[k] <= 0.0 &&
                                  diag > std::abs(blk.A.sub[k]) + std::abs(blk.A.super[k]))) {
                                out.pass = false;
                            }
                        }
                    }
                }
                ++configs;
            }
        }
    }
    out.detail = fmt("%d (eps, v, h) configurations", configs);
    return out;
}

// 9 --------------------------------------------------------------------------------

Outcome reflection() {
    const Mesh m(8, 8);
    GasLiquidParams fwd = tst::reference_gas_liquid();
    fwd.convection = {constant_function(1.0), constant_function(1.0)};
    GasLiquidParams back = fwd;
    back.g1star = [](double x, double y) { return (1 - x) * (1 - y); };
    back.convection = {constant_function(-1.0), constant_function(-1.0)};
    back.convection_sign = {SignClass::nonpositive, SignClass::nonpositive};

    const InitialSetup a = gas_liquid_initials(fwd, m);
    const InitialSetup b = gas_liquid_initials(back, m);
    SolverConfig left, right;
    left.method = Method::gs_left;
    right.method = Method::gs_right;
    const MonotoneRun ra = run_monotone(a.system, a.problem, left, a.lower, a.upper);
    const MonotoneRun rb = run_monotone(b.system, b.problem, right, b.lower, b.upper);
    double worst = 0.0;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i <= 8; ++i) {
            for (int j = 0; j <= 8; ++j) {
                worst = std::max(worst, std::abs(ra.solution.maximal(c, i, j) - rb.solution.maximal(c, 8 - i, 8 - j)));
                worst = std::max(worst, std::abs(ra.solution.minimal(c, i, j) - rb.solution.minimal(c, 8 - i, 8 - j)));
            }
        }
    }
    Outcome out;
    out.pass = worst <= 1e-9 && ra.solution.converged && rb.solution.converged;
    out.detail = fmt("max reflected difference %.1e, steps %d / %d", worst, ra.solution.iterations, rb.solution.iterations);
    return out;
}

// 10 -------------------------------------------------------------------------------

Outcome initial_pairs() {
    Outcome out;
    int pairs = 0;
    auto check = [&](const char* name, const BlockSystem& sys, const ProblemSpec& p, const GridPair& lo,
                     const GridPair& up) {
        const OrderedPairReport r = verify_ordered_pair(sys, p, lo, up, 1e-10);
        ++pairs;
        if (!r.passed()) {
            out.pass = false;
            out.detail += std::string(name) + ": " + r.summary() + "; ";
        }
    };
    std::mt19937_64 rng(1010);
    for (int n : {4, 8, 16}) {
        const Mesh m(n, n);
        // bounded reaction: linear model and a saturating quasimonotone model
        const ProblemSpec lin = linear_problem({1.0, 0.2}, {tst::random_bilinear(rng), tst::random_bilinear(rng)},
                                               {constant_function(3.0), constant_function(0.0)});
        const BlockSystem lsys = assemble(m, lin);
        check("bounded/linear", lsys, lin, lower_zero(lsys, lin), upper_from_bound(lsys, lin, {1.0, 2.0}));

        ProblemSpec sat = lin;
        sat.reaction = {[](double, double, double, double u2) { return -u2 / (1 + u2); },
                        [](double, double, double u1, double u2) { return u2 - u1 / (1 + u1); }};
        sat.reaction_jacobian = nullptr;
        sat.cbound = {constant_function(0.0), constant_function(1.0)};
        const BlockSystem ssys = assemble(m, sat);
        check("bounded/saturating", ssys, sat, lower_zero(ssys, sat), upper_from_bound(ssys, sat, {1.0, 1.0}));

        // constant pair
        check("constant/linear", lsys, lin, lower_zero(lsys, lin), upper_constant(lsys, lin, {4.0, 4.0}));
        const InitialSetup gc = gas_liquid_constant_initials(tst::reference_gas_liquid(), m);
        check("constant/gas-liquid", gc.system, gc.problem, gc.lower, gc.upper);

        // gas-liquid construction
        const InitialSetup gl = gas_liquid_initials(tst::reference_gas_liquid(), m);
        check("gas-liquid", gl.system, gl.problem, gl.lower, gl.upper);
        GasLiquidParams gp = tst::reference_gas_liquid();
        gp.rho1 = 2.0;
        gp.sigma1 = 5.0;
        gp.g2 = [](double x, double) { return 1 + x; };
        gp.convection = {constant_function(2.0), constant_function(0.0)};
        const InitialSetup g2 = gas_liquid_initials(gp, m);
        check("gas-liquid/varied", g2.system, g2.problem, g2.lower, g2.upper);
    }
    out.detail += fmt("%d pairs on 5x5, 9x9, 17x17", pairs);
    return out;
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"monotone ordering, block Jacobi, 17x17 gas-liquid", [] { return monotone_ordering(Method::jacobi); }},
        {"monotone ordering, block Gauss-Seidel left, 17x17 gas-liquid", [] { return monotone_ordering(Method::gs_left); }},
        {"Jacobi/Gauss-Seidel sandwich and iteration counts", sandwich},
        {"Newton solution bracketed by minimal and maximal limits, 9x9", bracketing},
        {"linear consistency with the line solver and Newton", linear_consistency},
        {"discrete maximum principle and solution estimate", maximum_principle},
        {"Gamma monotone on the gas-liquid sector", gamma_monotone},
        {"stencil and M-matrix structure", stencil_structure},
        {"upwind reflection: gs_left vs gs_right", reflection},
        {"initial pairs verified for all three recipes", initial_pairs},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
