#pragma once

#include <string>
#include <vector>

namespace fks {

// One property check: observed against expected within tolerance. The pass
// rule is check specific (relative error, bound or interval) and is decided
// by the producer.
struct CheckRow {
    std::string id;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

using CheckTable = std::vector<CheckRow>;

bool all_pass(const CheckTable& rows);
// "check,observed,expected,tolerance,pass" then one row per check.
std::string report_csv(const CheckTable& rows);

// Mittag-Leffler values against the frozen high-precision oracle, E_1 against
// exp, E_{beta,beta}(0) against 1/Gamma(beta).
CheckTable check_ml_accuracy();
// Integral of P and Y, min P relative to max P.
CheckTable check_kernel_normalization();
// ||P(t)||_2, ||Y(t)||_1 and the L2 -> L2 law of T(t) over t in [0.5, 8].
CheckTable check_decay_slopes();
// Radial tail slope of P for alpha = 1.5 on doubling boxes.
CheckTable check_tail_exponent();
// Nonlinearity off: per-mode error against the exact relaxation, K = 256.
CheckTable check_linear_exactness();
// Physical-space mass over K = 512 nonlinear steps.
CheckTable check_mass_conservation();
// min rho against ||rho||_inf for Gaussian data to t = 2.
CheckTable check_nonnegativity();
// lambda = 2 scaling symmetry on matched grids.
CheckTable check_scaling();
// Picard limit against the stepper, T = 0.1.
CheckTable check_picard();
// Interaction constant, supercritical blowup before the forecast, moment
// monotonicity, subcritical run staying bounded.
CheckTable check_blowup();
// Error reduction factors under dt halving.
CheckTable check_convergence();

// mlf, kernels, decay, nonlinear, blowup or all; throws ParameterError otherwise.
CheckTable run_suite(const std::string& name);

}  // namespace fks
