#pragma once

#include <memory>
#include <vector>

#include "fks/diagnostics.hpp"
#include "fks/grid.hpp"
#include "fks/mlf.hpp"
#include "fks/operators.hpp"

namespace fks {

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 0.1;
    int corrector_passes = 1;
    int snapshot_stride = 1;
    double blowup_guard = 1e6;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    bool nonlinear = true;
    MLAccuracyPolicy ml;

    void validate() const;
    int steps() const;  // round(t_end / dt)
    bool operator==(const SolverConfig&) const = default;
};

enum class Termination { completed, blowup_detected, resolution_failure, non_finite };

const char* termination_name(Termination t);

struct Snapshot {
    int step;
    double t;
    PhysicalField field;
};

struct DiagnosticsOptions {
    double nu = 0.0;  // 0: default for the model
    std::vector<double> extra_p;
    bool record = true;
};

struct SolutionTrajectory {
    std::vector<double> times;  // t_k = k dt for every computed state
    // i xi . g_hat^j on the retained modes for j = 0 .. steps-1
    std::vector<std::vector<cplx>> flux_history;
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRecord> diagnostics;
    Termination termination = Termination::completed;
    double last_valid_time = 0.0;
    PhysicalField current;
    SpectralField current_hat;
    double initial_linf = 0.0;

    int steps() const { return static_cast<int>(times.size()) - 1; }
};

// Discrete mild solution: with D_j = i xi . g_hat(rho^j),
//   rho_hat^{k+1} = E(t_{k+1}) rho_hat_0 - sum_{j<=k} W_{k-j} D_j,
//   W_m = G((m+1) dt) - G(m dt),  G(s) = (1 - E_beta(-|xi|^alpha s^beta)) / |xi|^alpha.
// Cost is O(K^2) mode-wise multiply-adds over K steps; the full history is kept.
class Stepper {
  public:
    Stepper(const PhysicalField& rho0, const ModelParams& params, const SolverConfig& config,
            const DiagnosticsOptions& diag = {});
    ~Stepper();

    SolutionTrajectory start() const;
    // Advances one step; returns false once the run has terminated.
    bool step(SolutionTrajectory& traj) const;

    const SpectralField& rho0_hat() const;
    // E_beta(-|xi|^alpha t_k^beta) for the mode.
    double relaxation(int k, std::size_t mode) const;
    // W_m on retained mode index i (position in ModeTable::retained_modes()).
    double weight(int m, std::size_t i) const;

  private:
    friend struct PicardAccess;
    struct Tables;
    std::unique_ptr<Tables> tab_;
};

SolutionTrajectory run(const PhysicalField& rho0, const ModelParams& params,
                       const SolverConfig& config, const DiagnosticsOptions& diag = {});

struct PicardResult {
    std::vector<PhysicalField> states;  // u_0 .. u_K
    std::vector<double> ratios;         // successive sup-in-time L2 difference ratios
    std::vector<double> differences;
    int iterations = 0;
    bool converged = false;
};

// Fixed-point iteration u <- S rho0 + H(u, u) on the time grid of config,
// using the same left-endpoint flux quadrature as the stepper (so its limit is
// run() with corrector_passes = 0). guess holds u_0..u_K; empty means the
// linear trajectory. Throws ContractionFailure after three ratios >= 1.
PicardResult picard_refine(const std::vector<PhysicalField>& guess, const PhysicalField& rho0,
                           const ModelParams& params, const SolverConfig& config);

}  // namespace fks
