#include <iostream>

#include "CLI11.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Block monotone Jacobi / Gauss-Seidel runner for coupled elliptic systems"};
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "Run description (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
    app.add_flag("--quiet", quiet, "Print nothing on success");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : monoblock::cli::exit_config;
    }

    using namespace monoblock::cli;
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.output_dir.empty()) {
        std::cerr << "config error: no output directory (set output_dir or pass --out)\n";
        return exit_config;
    }
    return run_from_config(cfg, cfg.output_dir, quiet);
}
