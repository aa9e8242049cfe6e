#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fks/grid.hpp"
#include "fks/mlf.hpp"

namespace fks {

struct ModelParams {
    double beta = 0.8;       // Caputo order, (0, 1)
    double alpha = 2.0;      // fractional Laplacian order, (1, 2]
    double gamma_pot = 2.0;  // potential order, (1, n]
    int n = 2;
    std::optional<double> s_const;  // kernel constant of the attractive field

    void validate() const;
    double p_crit() const;  // n / (alpha + gamma - 2)
    bool operator==(const ModelParams&) const = default;
};

// Multiplies by |xi|^alpha.
SpectralField frac_laplacian(const SpectralField& F, double alpha);

// B = grad (-Delta)^{-gamma/2} rho: component j has symbol i xi_j |xi|^{-gamma};
// the zero mode and axis-Nyquist components are set to zero.
std::vector<SpectralField> interaction_field(const SpectralField& F, double gamma_pot);

// Multiplies by E_beta(-|xi|^alpha t^beta).
SpectralField apply_S(const SpectralField& F, double t, const ModelParams& params,
                      const MLAccuracyPolicy& policy = {});
// Multiplies by t^{beta-1} E_{beta,beta}(-|xi|^alpha t^beta).
SpectralField apply_T(const SpectralField& F, double t, const ModelParams& params,
                      const MLAccuracyPolicy& policy = {});

// g = rho B(rho) on the grid, dealiased.
std::vector<PhysicalField> nonlinear_flux(const PhysicalField& rho, const ModelParams& params);

// i xi . g_hat restricted to the retained (dealiased) modes, in the order of
// ModeTable::retained_modes(). This is what the time integrator stores.
std::vector<cplx> flux_divergence(const PhysicalField& rho, const ModelParams& params);
// Same, starting from the spectrum of rho (avoids one forward transform).
std::vector<cplx> flux_divergence(const SpectralField& rho_hat, const PhysicalField& rho,
                                  const ModelParams& params);

// Direct evaluation of the planar convolution
//   I(x) = int (x - y) / |x - y|^2 rho(y) dy
// by polar quadrature centred at x, where the singularity cancels against the
// Jacobian. rho is a continuous density on R^2; r_max bounds its support.
std::array<double, 2> direct_attraction_2d(const std::function<double(double, double)>& rho,
                                           double x1, double x2, double r_max,
                                           int radial_nodes = 400, int angular_nodes = 256);

struct InteractionCalibration {
    double s_fit;             // least-squares s with B_spectral ~ -s I_direct
    double max_rel_residual;  // max |B_spectral + s_fit I| / max |I| over probes
    int probes;
};

// Fixes s_{2,2} by comparing the spectral field of a centred Gaussian with
// the direct convolution at 16 probe points (radii 0.25..1, four angles each).
InteractionCalibration calibrate_interaction_constant(double sigma = 0.5, double L = 200.0,
                                                      int N = 1024);

}  // namespace fks
