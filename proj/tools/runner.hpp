#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "monoblock/monoblock.hpp"

namespace monoblock::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_precondition = 2, exit_nonconvergence = 3 };

class ConfigError : public Error {
public:
    using Error::Error;
};

/// a + b x + c y + d xy
struct Bilinear {
    double c0 = 0.0, cx = 0.0, cy = 0.0, cxy = 0.0;

    ScalarFunction function() const {
        return [*this](double x, double y) { return c0 + cx * x + cy * y + cxy * x * y; };
    }
};

enum class InitKind { bounded, constant, gas_liquid };

struct RunConfig {
    std::string model = "gas-liquid";
    // model parameters; the gas-liquid ones are ignored by the linear model and vice versa
    double sigma1 = 1.0, k1 = 1.0, rho1 = 1.0;
    std::array<double, 2> eps{1.0, 1.0};
    std::array<double, 2> convection{0.0, 0.0};
    Bilinear g1star{};
    Bilinear g2{1.0, 0.0, 0.0, 0.0};
    std::array<Bilinear, 2> boundary{};
    int nx = 8, ny = 8;
    std::string method = "jacobi";
    double tol = 1e-10;
    int max_iter = 10000;
    InitKind init = InitKind::gas_liquid;
    std::array<double, 2> M{0.0, 0.0};
    std::optional<std::array<double, 2>> K;
    std::string output_dir;
};

namespace detail {

inline void only_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

inline void require(const json& j, const char* where, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing key '" + key + "'");
}

inline double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

inline std::array<double, 2> pair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected an array of two numbers");
    return {number(j[0], where), number(j[1], where)};
}

inline Bilinear bilinear(const json& j, const std::string& where) {
    only_keys(j, where.c_str(), {"const", "x", "y", "xy"});
    Bilinear b;
    if (j.contains("const")) b.c0 = number(j["const"], where + ".const");
    if (j.contains("x")) b.cx = number(j["x"], where + ".x");
    if (j.contains("y")) b.cy = number(j["y"], where + ".y");
    if (j.contains("xy")) b.cxy = number(j["xy"], where + ".xy");
    return b;
}

} // namespace detail

/// Parses and validates a run description. Throws ConfigError.
inline RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    using namespace detail;
    only_keys(j, "config", {"schema_version", "model", "mesh", "method", "tol", "max_iter", "init", "output_dir"});
    for (const char* key : {"schema_version", "model", "mesh", "method", "init"}) require(j, "config", key);
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
        throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
    }

    RunConfig cfg;
    const json& model = j["model"];
    only_keys(model, "model", {"name", "params"});
    require(model, "model", "name");
    if (!model["name"].is_string()) throw ConfigError("model.name: expected a string");
    cfg.model = model["name"].get<std::string>();
    if (!is_registered_model(cfg.model)) throw ConfigError("model.name: unknown model '" + cfg.model + "'");
    const json params = model.value("params", json::object());
    if (cfg.model == "gas-liquid") {
        only_keys(params, "model.params", {"sigma1", "k1", "rho1", "eps", "convection", "g1star", "g2"});
        if (params.contains("sigma1")) cfg.sigma1 = number(params["sigma1"], "model.params.sigma1");
        if (params.contains("k1")) cfg.k1 = number(params["k1"], "model.params.k1");
        if (params.contains("rho1")) cfg.rho1 = number(params["rho1"], "model.params.rho1");
        if (params.contains("g1star")) cfg.g1star = bilinear(params["g1star"], "model.params.g1star");
        if (params.contains("g2")) cfg.g2 = bilinear(params["g2"], "model.params.g2");
    } else {
        only_keys(params, "model.params", {"eps", "convection", "boundary"});
        if (params.contains("boundary")) {
            const json& b = params["boundary"];
            if (!b.is_array() || b.size() != 2) throw ConfigError("model.params.boundary: expected two entries");
            cfg.boundary = {bilinear(b[0], "model.params.boundary[0]"), bilinear(b[1], "model.params.boundary[1]")};
        }
    }
    if (params.contains("eps")) cfg.eps = pair(params["eps"], "model.params.eps");
    if (params.contains("convection")) cfg.convection = pair(params["convection"], "model.params.convection");

    const json& mesh = j["mesh"];
    only_keys(mesh, "mesh", {"nx", "ny"});
    require(mesh, "mesh", "nx");
    require(mesh, "mesh", "ny");
    if (!mesh["nx"].is_number_integer() || !mesh["ny"].is_number_integer()) {
        throw ConfigError("mesh: nx and ny must be integers");
    }
    cfg.nx = mesh["nx"].get<int>();
    cfg.ny = mesh["ny"].get<int>();
    if (cfg.nx < 2 || cfg.ny < 2) throw ConfigError("mesh: nx and ny must be >= 2");

    if (!j["method"].is_string()) throw ConfigError("method: expected a string");
    cfg.method = j["method"].get<std::string>();
    if (cfg.method != "jacobi" && cfg.method != "gs_left" && cfg.method != "gs_right" && cfg.method != "compare") {
        throw ConfigError("method: expected jacobi, gs_left, gs_right or compare, got '" + cfg.method + "'");
    }
    if (j.contains("tol")) cfg.tol = number(j["tol"], "tol");
    if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
    if (j.contains("max_iter")) {
        if (!j["max_iter"].is_number_integer()) throw ConfigError("max_iter: expected an integer");
        cfg.max_iter = j["max_iter"].get<int>();
    }
    if (cfg.max_iter < 1) throw ConfigError("max_iter must be >= 1");

    const json& init = j["init"];
    only_keys(init, "init", {"kind", "M", "K"});
    require(init, "init", "kind");
    const std::string kind = init["kind"].is_string() ? init["kind"].get<std::string>() : "";
    if (kind == "bounded") {
        cfg.init = InitKind::bounded;
        require(init, "init", "M");
        cfg.M = pair(init["M"], "init.M");
    } else if (kind == "constant") {
        cfg.init = InitKind::constant;
        if (init.contains("K")) cfg.K = pair(init["K"], "init.K");
    } else if (kind == "gas_liquid") {
        cfg.init = InitKind::gas_liquid;
    } else {
        throw ConfigError("init.kind: expected bounded, constant or gas_liquid");
    }
    if (cfg.init != InitKind::bounded && init.contains("M")) throw ConfigError("init.M applies to kind 'bounded' only");
    if (cfg.init != InitKind::constant && init.contains("K")) throw ConfigError("init.K applies to kind 'constant' only");

    if (cfg.model == "gas-liquid") {
        if (cfg.init == InitKind::bounded) {
            throw ConfigError("init 'bounded' is not compatible with the gas-liquid model (its reaction is unbounded below)");
        }
        if (cfg.K) throw ConfigError("gas-liquid constant init uses K = (rho1, max g2); init.K is not accepted");
    } else {
        if (cfg.init == InitKind::gas_liquid) throw ConfigError("init 'gas_liquid' requires the gas-liquid model");
        if (cfg.init == InitKind::constant && !cfg.K) throw ConfigError("init 'constant' needs K for the linear model");
    }

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("output_dir: expected a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace detail {

inline SignClass sign_of(double v) { return v >= 0.0 ? SignClass::nonnegative : SignClass::nonpositive; }

inline InitialSetup build_setup(const RunConfig& cfg, const Mesh& mesh) {
    if (cfg.model == "gas-liquid") {
        GasLiquidParams gp;
        gp.sigma1 = cfg.sigma1;
        gp.k1 = cfg.k1;
        gp.rho1 = cfg.rho1;
        gp.eps = cfg.eps;
        gp.g1star = cfg.g1star.function();
        gp.g2 = cfg.g2.function();
        gp.convection = {constant_function(cfg.convection[0]), constant_function(cfg.convection[1])};
        gp.convection_sign = {sign_of(cfg.convection[0]), sign_of(cfg.convection[1])};
        return cfg.init == InitKind::gas_liquid ? gas_liquid_initials(gp, mesh) : gas_liquid_constant_initials(gp, mesh);
    }
    ProblemSpec p = linear_problem(cfg.eps, {cfg.boundary[0].function(), cfg.boundary[1].function()},
                                   {constant_function(cfg.convection[0]), constant_function(cfg.convection[1])},
                                   {sign_of(cfg.convection[0]), sign_of(cfg.convection[1])});
    BlockSystem sys = assemble(mesh, p);
    GridPair lower = lower_zero(sys, p);
    GridPair upper = cfg.init == InitKind::bounded ? upper_from_bound(sys, p, cfg.M) : upper_constant(sys, p, *cfg.K);
    return {std::move(p), std::move(sys), std::move(lower), std::move(upper)};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline void write_grid(const std::filesystem::path& dir, const char* stem, const GridPair& g) {
    for (int a = 0; a < kComponents; ++a) {
        std::ostringstream os;
        write_component_csv(os, g, a);
        write_text(dir / (std::string(stem) + "_" + std::to_string(a + 1) + ".csv"), os.str());
    }
}

inline std::string trace_csv(const IterationTrace& t) {
    std::ostringstream os;
    t.write_csv(os);
    return os.str();
}

inline json summary_json(const std::string& method, const MonotoneRun& run, double wall_ms) {
    const IterationTrace& t = run.trace;
    const std::size_t n = t.size();
    return json{
        {"method", method},
        {"iterations", run.solution.iterations},
        {"converged", run.solution.converged},
        {"final_znorm", n ? std::max(t.znorm_upper[n - 1], t.znorm_lower[n - 1]) : 0.0},
        {"final_residual", n ? std::max(t.res_upper[n - 1], t.res_lower[n - 1]) : 0.0},
        {"max_minus_min_norm", max_norm_diff(run.solution.maximal, run.solution.minimal)},
        {"wall_ms", wall_ms},
    };
}

inline void write_run(const std::filesystem::path& dir, const MonotoneRun& run) {
    write_grid(dir, "maximal", run.solution.maximal);
    write_grid(dir, "minimal", run.solution.minimal);
    const std::string trace = trace_csv(run.trace);
    write_text(dir / "trace_upper.csv", trace);
    write_text(dir / "trace_lower.csv", trace);
}

} // namespace detail

/// Executes a parsed run and writes its outputs into `out_dir`. Returns an ExitCode;
/// library errors are reported on `err`.
inline int run_from_config(const RunConfig& cfg, const std::filesystem::path& out_dir, bool quiet,
                           std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    try {
        const Mesh mesh(cfg.nx, cfg.ny);
        const InitialSetup s = detail::build_setup(cfg, mesh);
        std::filesystem::create_directories(out_dir);

        SolverConfig sc;
        sc.tol = cfg.tol;
        sc.max_iter = cfg.max_iter;
        bool converged = false;
        if (cfg.method == "compare") {
            const ComparisonReport r = compare_methods(s.system, s.problem, sc, s.lower, s.upper);
            const double ms = elapsed_ms();
            detail::write_run(out_dir, r.gs);
            detail::write_text(out_dir / "trace_jacobi.csv", detail::trace_csv(r.jacobi.trace));
            detail::write_text(out_dir / "trace_gs.csv", detail::trace_csv(r.gs.trace));
            json summary = detail::summary_json("compare", r.gs, ms);
            detail::write_text(out_dir / "summary.json", summary.dump(2) + "\n");
            const json cmp{{"iters_jacobi", r.iters_jacobi}, {"iters_gs", r.iters_gs}, {"sandwich_ok", r.sandwich_ok}};
            detail::write_text(out_dir / "comparison.json", cmp.dump(2) + "\n");
            converged = r.jacobi_converged && r.gs_converged;
            if (!quiet) {
                log << "compare (" << to_string(r.gs_method) << "): jacobi " << r.iters_jacobi << " steps, gs "
                    << r.iters_gs << " steps, sandwich " << (r.sandwich_ok ? "ok" : "broken") << "\n";
            }
        } else {
            sc.method = cfg.method == "jacobi" ? Method::jacobi
                        : cfg.method == "gs_left" ? Method::gs_left
                                                  : Method::gs_right;
            const MonotoneRun run = run_monotone(s.system, s.problem, sc, s.lower, s.upper);
            const double ms = elapsed_ms();
            detail::write_run(out_dir, run);
            const json summary = detail::summary_json(cfg.method, run, ms);
            detail::write_text(out_dir / "summary.json", summary.dump(2) + "\n");
            converged = run.solution.converged;
            if (!quiet) {
                log << cfg.method << ": " << run.solution.iterations << " steps, converged "
                    << (converged ? "yes" : "no") << ", |max - min| = " << summary["max_minus_min_norm"].get<double>()
                    << "\n";
            }
        }
        if (!converged) {
            err << "error: no convergence within " << cfg.max_iter << " steps\n";
            return exit_nonconvergence;
        }
        return exit_ok;
    } catch (const NonconvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const Error& e) {
        // preconditions, direction checks, evaluation failures, ordering violations
        err << "error: " << e.what() << "\n";
        return exit_precondition;
    }
}

} // namespace monoblock::cli
