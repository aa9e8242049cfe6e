// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number, e.g. `fks_acceptance 1 8`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <string>

#include "classical_ks.hpp"
#include "fks/integrator.hpp"
#include "fks/validation.hpp"

using namespace fks;

namespace {

// beta close to 1 against an independent classical solver.
CheckTable check_classical_limit() {
    GridSpec g{2, 128, 20.0, 2.0 / 3.0};
    const double M = 4 * M_PI, T = 0.5;
    PhysicalField rho0 = sample(g, [&](std::span<const double> x) {
        return M * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) / (2 * M_PI);
    });
    ModelParams p;
    p.beta = 0.999;
    p.alpha = 2.0;
    p.gamma_pot = 2.0;
    SolverConfig c;
    c.dt = T / 512;
    c.t_end = T;
    DiagnosticsOptions quiet;
    quiet.record = false;
    SolutionTrajectory tr = run(rho0, p, c, quiet);
    std::vector<double> ref = classical::solve(rho0.values(), g.points_per_axis, g.side_length, T, 2000);
    PhysicalField diff(g), r(g, ref);
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = tr.current[i] - ref[i];
    double gap = lp_norm(diff, 2.0) / lp_norm(r, 2.0);
    return {{"classical_rel_l2", gap, 1e-2, 0.0, gap <= 1e-2},
            {"completed", tr.termination == Termination::completed ? 1.0 : 0.0, 1.0, 0.0,
             tr.termination == Termination::completed}};
}

struct Criterion {
    int id;
    const char* name;
    std::function<CheckTable()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion all[] = {
        {1, "mittag-leffler accuracy", check_ml_accuracy},
        {2, "kernel normalization and positivity", check_kernel_normalization},
        {3, "decay slopes", check_decay_slopes},
        {4, "tail exponent", check_tail_exponent},
        {5, "linear exactness", check_linear_exactness},
        {6, "mass conservation", check_mass_conservation},
        {7, "nonnegativity", check_nonnegativity},
        {8, "classical limit", check_classical_limit},
        {9, "scaling symmetry", check_scaling},
        {10, "picard cross-validation", check_picard},
        {11, "blowup dichotomy", check_blowup},
        {12, "convergence order", check_convergence},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckTable rows;
        std::string error;
        try {
            rows = c.check();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = error.empty() && !rows.empty() && all_pass(rows);
        failures += !pass;
        std::printf("%s criterion %d: %s (%zu checks, %.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    rows.size(), secs);
        if (!error.empty())
            std::printf("    error: %s\n", error.c_str());
        for (const auto& r : rows)
            if (!r.pass || rows.size() <= 12)
                std::printf("    %s %-40s observed %.6g expected %.6g tolerance %.3g\n",
                            r.pass ? "ok  " : "FAIL", r.id.c_str(), r.observed, r.expected, r.tolerance);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
