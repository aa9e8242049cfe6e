#include "fks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fks/errors.hpp"
#include "fks/fundsol.hpp"
#include "fks/integrator.hpp"
#include "fks/operators.hpp"
#include "fks/simd.hpp"

namespace fks {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double DiagnosticsRecord::norm(double p) const {
    auto it = lp_norms.find(p);
    if (it == lp_norms.end())
        throw ParameterError("DiagnosticsRecord: norm not recorded for p = " + std::to_string(p));
    return it->second;
}

void check_moment_order(double nu, const ModelParams& params) {
    bool ok = params.alpha == 2.0 ? (nu > 1.0 && nu <= 2.0) : (nu > 1.0 && nu < params.alpha);
    if (!ok)
        throw ParameterError("moment order nu = " + std::to_string(nu) +
                             " outside (1, alpha) (or (1, 2] when alpha = 2)");
}

double default_moment_order(const ModelParams& params) {
    return params.alpha == 2.0 ? 2.0 : 0.5 * (1.0 + params.alpha);
}

double critical_exponent(const ModelParams& params) {
    double d = params.alpha + params.gamma_pot - 2.0;
    if (!(d > 0.0))
        throw ParameterError("critical_exponent: need alpha + gamma > 2");
    return params.n / d;
}

DiagnosticsRecord record(const PhysicalField& rho, double t, const ModelParams& params, double nu,
                         const RecordOptions& opts) {
    check_moment_order(nu, params);
    const GridSpec& g = rho.grid();
    const std::size_t size = rho.size();
    const double* v = rho.values().data();
    DiagnosticsRecord r;
    r.t = t;
    r.mass = opts.mass ? *opts.mass : integrate(rho);
    r.lp_norms[1.0] = lp_norm(rho, 1.0);
    r.lp_norms[2.0] = lp_norm(rho, 2.0);
    r.lp_norms[kInf] = simd::max_abs(v, size);
    double pc = critical_exponent(params);
    if (std::isfinite(pc) && !r.lp_norms.count(pc))
        r.lp_norms[pc] = lp_norm(rho, pc);
    for (double p : opts.extra_p)
        if (!r.lp_norms.count(p))
            r.lp_norms[p] = std::isinf(p) ? r.lp_norms[kInf] : lp_norm(rho, p);
    r.min_value = simd::min_value(v, size);

    PhysicalField local;
    const PhysicalField* w = opts.moment_weight;
    if (!w) {
        local = moment_weight(g, nu);
        w = &local;
    }
    std::vector<double> prod(size);
    simd::multiply(v, w->values().data(), prod.data(), size);
    r.moment_nu = simd::sum(prod.data(), size) * g.cell_volume();

    // |x|_inf > 0.4 L on the grid x_j = -L/2 + j h.
    const int N = g.points_per_axis;
    const double cut = 0.4 * g.side_length;
    std::vector<char> outer(N);
    for (int j = 0; j < N; ++j)
        outer[j] = std::abs(g.coordinate(j)) > cut;
    double total = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t rest = i;
        bool out = false;
        for (int a = 0; a < g.n && !out; ++a) {
            out = outer[rest % N];
            rest /= N;
        }
        double a = std::abs(v[i]);
        total += a;
        if (out)
            edge += a;
    }
    r.boundary_mass_fraction = total > 0.0 ? edge / total : 0.0;
    r.maxnorm_ratio = opts.initial_linf > 0.0 ? r.lp_norms[kInf] / opts.initial_linf : 1.0;
    return r;
}

namespace {
std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

std::string diagnostics_csv_header(std::span<const double> extra_p) {
    std::string h = "t,mass,l1,l2,linf,lpc,min,moment,boundary_frac,ratio";
    for (double p : extra_p)
        h += ",l" + (std::isinf(p) ? std::string("inf") : num(p));
    return h;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r, const ModelParams& params,
                                std::span<const double> extra_p) {
    std::string s = num(r.t) + "," + num(r.mass) + "," + num(r.norm(1.0)) + "," + num(r.norm(2.0)) +
                    "," + num(r.norm(kInf)) + "," + num(r.norm(critical_exponent(params))) + "," +
                    num(r.min_value) + "," + num(r.moment_nu) + "," + num(r.boundary_mass_fraction) +
                    "," + num(r.maxnorm_ratio);
    for (double p : extra_p)
        s += "," + num(r.norm(p));
    return s;
}

BlowupForecast forecast_blowup(const DiagnosticsRecord& record0, const ModelParams& params, double nu) {
    if (!params.s_const)
        throw ConfigError("forecast_blowup: s_const is not set");
    const double s = *params.s_const;
    const double M = record0.mass;
    BlowupForecast f;
    f.applicable = params.alpha == 2.0 && params.gamma_pot == params.n && nu == 2.0;
    f.mass_threshold = 2.0 * params.n / s;
    f.c2 = 2.0 * params.n * M - s * M * M;
    f.t_star_upper = kInf;
    if (f.applicable && f.c2 < 0.0)
        f.t_star_upper =
            std::pow(std::tgamma(params.beta + 1.0) * record0.moment_nu / (-f.c2), 1.0 / params.beta);
    return f;
}

OperatorDecayResult operator_decay_check(const PhysicalField& u, const ModelParams& params,
                                         OperatorKind kind, double q, double r,
                                         std::span<const double> times) {
    DecayLaw law{kind == OperatorKind::S ? LawKind::S_rq : LawKind::T_rq, r, q};
    DecayFit fit = decay_rate_fit(law, params, u.grid(), times, &u);
    OperatorDecayResult out;
    out.fitted_slope = fit.fitted_slope;
    out.predicted_slope = fit.predicted_slope;
    out.slope_ok = fit.pass;
    out.max_prefactor = fit.max_prefactor;
    out.norms = fit.norms;

    // Pointwise L-infinity bounds; 1e-9 relative slack for spectral roundoff.
    const double uinf = lp_norm(u, kInf);
    const SpectralField uh = forward(u);
    out.linf_contraction_ok = true;
    for (double t : times) {
        double bound, val;
        if (kind == OperatorKind::S) {
            val = lp_norm(inverse(apply_S(uh, t, params)), kInf);
            bound = uinf;
        } else {
            val = lp_norm(inverse(apply_T(uh, t, params)), kInf);
            bound = std::pow(t, params.beta - 1.0) * uinf / std::tgamma(params.beta);
        }
        if (val > bound * (1.0 + 1e-9))
            out.linf_contraction_ok = false;
    }
    out.pass = out.slope_ok && out.linf_contraction_ok;
    return out;
}

double scaling_check(const PhysicalField& rho0, const ModelParams& params, double lambda, double t,
                     const SolverConfig& config) {
    if (!(lambda > 0.0))
        throw ParameterError("scaling_check: lambda must be > 0");
    const double amp = std::pow(lambda, params.alpha + params.gamma_pot - 2.0);
    const double tscale = std::pow(lambda, -params.alpha / params.beta);

    SolverConfig c0 = config;
    c0.t_end = t;
    DiagnosticsOptions quiet;
    quiet.record = false;
    SolutionTrajectory a = run(rho0, params, c0, quiet);

    GridSpec g1 = rho0.grid();
    g1.side_length /= lambda;
    std::vector<double> v1 = rho0.values();
    for (double& x : v1)
        x *= amp;
    SolverConfig c1 = c0;
    c1.dt *= tscale;
    c1.t_end = t * tscale;
    SolutionTrajectory b = run(PhysicalField(g1, std::move(v1)), params, c1, quiet);

    if (a.termination != Termination::completed || b.termination != Termination::completed)
        throw AccuracyError("scaling_check: a run terminated early", kInf);
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < a.current.size(); ++i) {
        double ref = amp * a.current[i];
        double d = b.current[i] - ref;
        num2 += d * d;
        den2 += ref * ref;
    }
    return std::sqrt(num2 / den2);
}

}  // namespace fks
