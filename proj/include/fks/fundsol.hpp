#pragma once

#include <span>
#include <string>
#include <vector>

#include "fks/grid.hpp"
#include "fks/mlf.hpp"
#include "fks/operators.hpp"

namespace fks {

// Kernels of S(t) and T(t): P has symbol E_beta(-|xi|^alpha t^beta),
// Y = t^{beta-1} Q with Q symbol E_{beta,beta}(-|xi|^alpha t^beta).
// Both throw ResolutionError when t^{beta/alpha} < 2h.
PhysicalField build_P(double t, const GridSpec& grid, const ModelParams& params,
                      const MLAccuracyPolicy& policy = {});
PhysicalField build_Y(double t, const GridSpec& grid, const ModelParams& params,
                      const MLAccuracyPolicy& policy = {});
std::vector<PhysicalField> build_grad_P(double t, const GridSpec& grid, const ModelParams& params,
                                        const MLAccuracyPolicy& policy = {});
std::vector<PhysicalField> build_grad_Y(double t, const GridSpec& grid, const ModelParams& params,
                                        const MLAccuracyPolicy& policy = {});

// True when 2h <= t^{beta/alpha} <= L/8.
bool resolvable(double t, const GridSpec& grid, const ModelParams& params);

// Shell average over bins of width h centred on the origin.
struct RadialProfile {
    std::vector<double> radius;  // mean radius of the points in the shell
    std::vector<double> value;
    std::vector<std::size_t> count;
};
RadialProfile radial_profile(const PhysicalField& f);

// Log-log slope of the radial profile over [4 t^{beta/alpha}, 0.4 L].
// Requires alpha < 2; throws ResolutionError if the annulus spans less than a
// factor 2 in radius.
double tail_exponent_fit(const PhysicalField& kernel, const ModelParams& params, double t);

enum class LawKind { P, gradP, Y, gradY, S_rq, T_rq };

const char* law_name(LawKind k);

struct KappaThresholds {
    double k1, k2, k3, k4;  // n/(n-a), n/(n-a+1), n/(n-2a), n/(n-2a+1); inf if the denominator <= 0
};
KappaThresholds kappa_thresholds(int n, double alpha);

// Kernel laws use p; operator laws map L^q to L^r with p = r.
struct DecayLaw {
    LawKind kind = LawKind::P;
    double p = 2.0;
    double q = 1.0;

    double predicted_slope(const ModelParams& params) const;
    // Throws DomainError if (p, q) is outside the admissible region.
    void check_validity(const ModelParams& params) const;
};

bool slope_within_contract(double fitted, double predicted);

struct DecayFit {
    double fitted_slope = 0.0;
    double predicted_slope = 0.0;
    bool pass = false;
    std::vector<double> times;
    std::vector<double> norms;
    // Operator laws: max over t of ||out(t)||_r / (t^{slope} ||u||_q).
    double max_prefactor = 0.0;
};

// Least-squares slope of log||.|| against log t. Operator laws act on
// test_function; when none is given a centred Gaussian is used (width L/10
// when r = q, 4h otherwise).
DecayFit decay_rate_fit(const DecayLaw& law, const ModelParams& params, const GridSpec& grid,
                        std::span<const double> times, const PhysicalField* test_function = nullptr,
                        const MLAccuracyPolicy& policy = {});

// log-log least squares slope
double fit_slope(std::span<const double> x, std::span<const double> y);

// Rows "law,p,q,t,norm,predicted_slope,fitted_slope".
std::string decay_table_csv(const DecayLaw& law, const DecayFit& fit, bool header = true);

}  // namespace fks
