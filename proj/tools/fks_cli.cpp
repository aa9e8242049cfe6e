#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fks/config.hpp"
#include "fks/diagnostics.hpp"
#include "fks/errors.hpp"
#include "fks/fundsol.hpp"
#include "fks/integrator.hpp"
#include "fks/parallel.hpp"
#include "fks/simd.hpp"
#include "fks/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, failed_checks = 1, config_error = 2, numerical_failure = 3, resolution_guard = 4 };

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw fks::Error("cannot write " + path.string());
    out << text;
}

std::string snapshot_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06d.fks1", step);
    return buf;
}

int cmd_run(const std::string& config_path) {
    using namespace fks;
    ExperimentConfig cfg;
    PhysicalField rho0;
    try {
        cfg = load_config(config_path);
        rho0 = build_initial_condition(cfg);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    const auto& ic = cfg.initial_condition;
    if ((ic.kind == InitialKind::gaussian || ic.kind == InitialKind::two_bumps) &&
        ic.width < 2.0 * cfg.grid.spacing()) {
        std::cerr << "resolution guard: initial width " << ic.width << " is below 2h = "
                  << 2.0 * cfg.grid.spacing() << "\n";
        return resolution_guard;
    }
    json warnings = json::array();
    double outside = mass_outside_quarter_box(rho0);
    if (outside > 1e-10) {
        std::string w = "initial data carries " + std::to_string(outside) +
                        " of its mass outside [-L/4, L/4]^n; enlarge side_length";
        std::cerr << "warning: " << w << "\n";
        warnings.push_back(w);
    }

    const fs::path dir(cfg.outputs);
    fs::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    DiagnosticsOptions dopt{cfg.diagnostics.nu, cfg.diagnostics.lp_set, true};
    const auto& extra = cfg.diagnostics.lp_set;

    SolutionTrajectory traj;
    try {
        Stepper stepper(rho0, cfg.model, cfg.solver, dopt);
        traj = stepper.start();
        std::ofstream csv(dir / "diagnostics.csv", std::ios::binary);
        csv << diagnostics_csv_header(extra) << "\n";
        std::size_t rows = 0;
        auto flush = [&] {
            for (; rows < traj.diagnostics.size(); ++rows)
                csv << diagnostics_csv_row(traj.diagnostics[rows], cfg.model, extra) << "\n";
            for (const auto& s : traj.snapshots)
                write_fks1((dir / snapshot_name(s.step)).string(), s.field);
            traj.snapshots.clear();
        };
        flush();
        while (stepper.step(traj))
            flush();
        flush();
    } catch (const ResolutionError& e) {
        std::cerr << "resolution guard: " << e.what() << "\n";
        return resolution_guard;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["config"] = json::parse(to_json_text(cfg));
    manifest["termination"] = termination_name(traj.termination);
    manifest["last_time"] = traj.last_valid_time;
    manifest["steps"] = traj.steps();
    manifest["wall_time_seconds"] = wall;
    manifest["simd_backend"] = simd::backend_name(simd::active_backend());
    manifest["threads"] = thread_count();
    manifest["warnings"] = warnings;
    const double nu = cfg.diagnostics.nu == 0.0 ? default_moment_order(cfg.model) : cfg.diagnostics.nu;
    if (cfg.model.s_const && !traj.diagnostics.empty()) {
        BlowupForecast f = forecast_blowup(traj.diagnostics.front(), cfg.model, nu);
        manifest["forecast"] = {{"applicable", f.applicable},
                                {"mass_threshold", f.mass_threshold},
                                {"c2", f.c2},
                                {"t_star_upper", std::isinf(f.t_star_upper) ? json("inf") : json(f.t_star_upper)}};
    } else {
        manifest["forecast"] = nullptr;
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "termination=" << termination_name(traj.termination) << " last_time=" << traj.last_valid_time
              << " steps=" << traj.steps() << "\n";
    return traj.termination == Termination::non_finite ? numerical_failure : ok;
}

int cmd_validate(const std::string& suite, const std::string& report) {
    fks::CheckTable rows;
    try {
        rows = fks::run_suite(suite);
    } catch (const fks::ParameterError& e) {
        std::cerr << e.what() << "\n";
        return config_error;
    }
    std::string csv = fks::report_csv(rows);
    if (report.empty()) {
        std::cout << csv;
    } else {
        write_text(report, csv);
    }
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.pass) {
            ++failed;
            std::cerr << "FAIL " << r.id << " observed=" << r.observed << " expected=" << r.expected << "\n";
        }
    std::cerr << suite << ": " << rows.size() - failed << "/" << rows.size() << " checks pass\n";
    return failed == 0 ? ok : failed_checks;
}

int cmd_kernel(const std::string& config_path, double t, const std::string& which) {
    using namespace fks;
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    PhysicalField K;
    try {
        K = which == "P" ? build_P(t, cfg.grid, cfg.model, cfg.solver.ml) : build_Y(t, cfg.grid, cfg.model, cfg.solver.ml);
    } catch (const ResolutionError& e) {
        std::cerr << "resolution guard: " << e.what() << "\n";
        return resolution_guard;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    }
    const fs::path dir(cfg.outputs);
    fs::create_directories(dir);
    char stem[64];
    std::snprintf(stem, sizeof stem, "kernel_%s_t%g", which.c_str(), t);
    write_fks1((dir / (std::string(stem) + ".fks1")).string(), K);
    RadialProfile prof = radial_profile(K);
    std::string csv = "r,value\n";
    for (std::size_t i = 0; i < prof.radius.size(); ++i) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", prof.radius[i], prof.value[i]);
        csv += buf;
    }
    write_text(dir / (std::string(stem) + ".csv"), csv);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-space fractional Keller-Segel simulator"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run = app.add_subcommand("run", "Run a simulation from a JSON config");
    run->add_option("config", run_config, "config file")->required();

    std::string suite, report;
    auto* validate = app.add_subcommand("validate", "Run a validation suite");
    validate->add_option("suite", suite, "mlf, kernels, decay, nonlinear, blowup or all")->required();
    validate->add_option("--report", report, "write the report CSV here instead of stdout");

    std::string kernel_config, which = "P";
    double t = 1.0;
    auto* kernel = app.add_subcommand("kernel", "Dump P or Y with its radial profile");
    kernel->add_option("config", kernel_config, "config file")->required();
    kernel->add_option("--t", t, "time")->required();
    kernel->add_option("--which", which, "P or Y")->check(CLI::IsMember({"P", "Y"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : config_error;
    }
    try {
        if (*run)
            return cmd_run(run_config);
        if (*validate)
            return cmd_validate(suite, report);
        if (*kernel)
            return cmd_kernel(kernel_config, t, which);
    } catch (const fks::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical_failure;
    }
    return ok;
}
