#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fks/grid.hpp"
#include "fks/operators.hpp"

namespace fks {

struct SolverConfig;

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    std::map<double, double> lp_norms;  // always 1, 2, inf and p_crit when finite
    double min_value = 0.0;
    double moment_nu = 0.0;
    double boundary_mass_fraction = 0.0;  // share of |rho| mass with |x|_inf > 0.4 L
    double maxnorm_ratio = 1.0;           // ||rho||_inf / ||rho_0||_inf

    double norm(double p) const;
};

struct RecordOptions {
    std::vector<double> extra_p;
    double initial_linf = 0.0;    // 0: ratio reported as 1
    std::optional<double> mass;   // exact mass when the caller has it (the xi = 0 coefficient)
    const PhysicalField* moment_weight = nullptr;  // precomputed phi_nu, reused across steps
};

// Valid nu: 1 < nu < alpha, or 1 < nu <= 2 when alpha = 2.
void check_moment_order(double nu, const ModelParams& params);
double default_moment_order(const ModelParams& params);

DiagnosticsRecord record(const PhysicalField& rho, double t, const ModelParams& params, double nu,
                         const RecordOptions& opts = {});

// CSV header t,mass,l1,l2,linf,lpc,min,moment,boundary_frac,ratio followed by
// one l<p> column per extra p.
std::string diagnostics_csv_header(std::span<const double> extra_p = {});
std::string diagnostics_csv_row(const DiagnosticsRecord& r, const ModelParams& params,
                                std::span<const double> extra_p = {});

struct BlowupForecast {
    bool applicable = false;  // alpha = 2, gamma = n, nu = 2
    double mass_threshold = 0.0;
    double c2 = 0.0;
    double t_star_upper = 0.0;  // infinity unless c2 < 0
};

// T* = (Gamma(beta+1) omega(0) / (-c2))^{1/beta}, c2 = 2nM - s M^2.
// Throws ConfigError when s_const is unset.
BlowupForecast forecast_blowup(const DiagnosticsRecord& record0, const ModelParams& params,
                               double nu = 2.0);

enum class OperatorKind { S, T };

struct OperatorDecayResult {
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
    bool slope_ok = false;
    bool linf_contraction_ok = false;  // pointwise in t
    double max_prefactor = 0.0;
    bool pass = false;
    std::vector<double> norms;
};

OperatorDecayResult operator_decay_check(const PhysicalField& u, const ModelParams& params,
                                         OperatorKind kind, double q, double r,
                                         std::span<const double> times);

// Relative L2 gap between the scaled run (rho0 -> lambda^{alpha+gamma-2}
// rho0(lambda x), L -> L/lambda, dt -> dt lambda^{-alpha/beta}) and the
// scaled output of the original run, at time t.
double scaling_check(const PhysicalField& rho0, const ModelParams& params, double lambda, double t,
                     const SolverConfig& config);

double critical_exponent(const ModelParams& params);

}  // namespace fks
