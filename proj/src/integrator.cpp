#include "fks/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fks/errors.hpp"
#include "fks/parallel.hpp"
#include "fks/simd.hpp"

namespace fks {

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ParameterError("SolverConfig: dt must be > 0");
    if (!(t_end >= dt))
        throw ParameterError("SolverConfig: t_end must be >= dt");
    if (corrector_passes < 0)
        throw ParameterError("SolverConfig: corrector_passes must be >= 0");
    if (snapshot_stride < 1)
        throw ParameterError("SolverConfig: snapshot_stride must be >= 1");
    if (!(blowup_guard > 1.0))
        throw ParameterError("SolverConfig: blowup_guard must be > 1");
    if (!(picard_tol > 0.0))
        throw ParameterError("SolverConfig: picard_tol must be > 0");
    if (picard_max_iter < 1)
        throw ParameterError("SolverConfig: picard_max_iter must be >= 1");
    ml.validate();
}

int SolverConfig::steps() const { return static_cast<int>(std::llround(t_end / dt)); }

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup_detected: return "blowup_detected";
        case Termination::resolution_failure: return "resolution_failure";
        case Termination::non_finite: return "non_finite";
    }
    return "?";
}

struct Stepper::Tables {
    GridSpec grid;
    ModelParams params;
    SolverConfig config;
    DiagnosticsOptions diag;
    std::shared_ptr<const ModeTable> modes;
    PhysicalField rho0;
    SpectralField rho0_hat;
    PhysicalField weight;  // moment weight
    int K = 0;
    std::size_t shells = 0;
    std::size_t active = 0;
    std::vector<double> E;  // (K+1) x shells
    std::vector<double> W;  // K x active

    const double* E_row(int k) const { return E.data() + static_cast<std::size_t>(k) * shells; }
    const double* W_row(int m) const { return W.data() + static_cast<std::size_t>(m) * active; }

    // base = E(t_k) rho0_hat - sum_{j<n} W_{k-1-j} D_j on the retained modes,
    // where n = hist.size() entries are used (k - 1 - j >= 0).
    SpectralField base(int k, const std::vector<std::vector<cplx>>& hist, std::size_t n) const;
    std::vector<cplx> divergence(const SpectralField& uh, const PhysicalField& u) const;
};

Stepper::Stepper(const PhysicalField& rho0, const ModelParams& params, const SolverConfig& config,
                 const DiagnosticsOptions& diag)
    : tab_(std::make_unique<Tables>()) {
    params.validate();
    config.validate();
    if (rho0.grid().n != params.n)
        throw ParameterError("Stepper: grid dimension differs from the model dimension");
    if (!rho0.all_finite())
        throw ParameterError("Stepper: initial data must be finite");
    auto& T = *tab_;
    T.grid = rho0.grid();
    T.params = params;
    T.config = config;
    T.diag = diag;
    if (T.diag.nu == 0.0)
        T.diag.nu = default_moment_order(params);
    check_moment_order(T.diag.nu, params);
    T.modes = mode_table(T.grid);
    T.rho0 = rho0;
    T.rho0_hat = forward(rho0);
    T.weight = moment_weight(T.grid, T.diag.nu);
    T.K = config.steps();
    T.shells = T.modes->shells().size();
    const auto& keep = T.modes->retained_modes();
    T.active = keep.size();

    const int K = T.K;
    const double dt = config.dt;
    const double beta = params.beta;
    const double unit = T.modes->wavenumber_unit();
    MittagLeffler e1(MLOrder{beta, 1.0}, config.ml);
    std::vector<double> tb(K + 1);
    for (int m = 0; m <= K; ++m)
        tb[m] = std::pow(m * dt, beta);

    T.E.assign(static_cast<std::size_t>(K + 1) * T.shells, 0.0);
    std::vector<double> G(static_cast<std::size_t>(K + 1) * T.shells, 0.0);
    parallel_for(T.shells, [&](std::size_t b, std::size_t e) {
        for (std::size_t u = b; u < e; ++u) {
            double lam = std::pow(unit * std::sqrt(double(T.modes->shells()[u])), params.alpha);
            for (int m = 0; m <= K; ++m) {
                double y = lam * tb[m];
                double E, F;
                if (y <= config.ml.series_cutoff) {
                    F = e1.complement_ratio(y);
                    E = 1.0 - y * F;
                } else {
                    E = e1(y);
                    F = (1.0 - E) / y;
                }
                T.E[static_cast<std::size_t>(m) * T.shells + u] = E;
                G[static_cast<std::size_t>(m) * T.shells + u] = tb[m] * F;
            }
        }
    });
    T.W.assign(static_cast<std::size_t>(K) * T.active, 0.0);
    for (int m = 0; m < K; ++m) {
        const double* g0 = G.data() + static_cast<std::size_t>(m) * T.shells;
        const double* g1 = g0 + T.shells;
        double* w = T.W.data() + static_cast<std::size_t>(m) * T.active;
        for (std::size_t i = 0; i < T.active; ++i) {
            std::size_t u = T.modes->shell(keep[i]);
            w[i] = g1[u] - g0[u];
        }
    }
}

Stepper::~Stepper() = default;

const SpectralField& Stepper::rho0_hat() const { return tab_->rho0_hat; }

double Stepper::relaxation(int k, std::size_t mode) const {
    return tab_->E_row(k)[tab_->modes->shell(mode)];
}

double Stepper::weight(int m, std::size_t i) const { return tab_->W_row(m)[i]; }

std::vector<cplx> Stepper::Tables::divergence(const SpectralField& uh, const PhysicalField& u) const {
    if (!config.nonlinear)
        return std::vector<cplx>(active, cplx(0.0, 0.0));
    return flux_divergence(uh, u, params);
}

SpectralField Stepper::Tables::base(int k, const std::vector<std::vector<cplx>>& hist,
                                    std::size_t n) const {
    SpectralField out(grid);
    const double* e = E_row(k);
    for (std::size_t m = 0; m < out.size(); ++m)
        out[m] = e[modes->shell(m)] * rho0_hat[m];
    if (!config.nonlinear || n == 0)
        return out;
    std::vector<cplx> acc(active, cplx(0.0, 0.0));
    parallel_for(active, [&](std::size_t b, std::size_t end) {
        for (std::size_t j = 0; j < n; ++j)
            simd::accumulate_scaled(W_row(k - 1 - static_cast<int>(j)) + b, hist[j].data() + b,
                                    acc.data() + b, end - b);
    });
    const auto& keep = modes->retained_modes();
    for (std::size_t i = 0; i < active; ++i)
        out[keep[i]] -= acc[i];
    return out;
}

SolutionTrajectory Stepper::start() const {
    const auto& T = *tab_;
    SolutionTrajectory traj;
    traj.times.push_back(0.0);
    traj.current = T.rho0;
    traj.current_hat = T.rho0_hat;
    traj.initial_linf = lp_norm(T.rho0, INFINITY);
    traj.last_valid_time = 0.0;
    traj.snapshots.push_back({0, 0.0, T.rho0});
    if (T.diag.record) {
        RecordOptions ro{T.diag.extra_p, traj.initial_linf, T.rho0_hat[0].real(), &T.weight};
        traj.diagnostics.push_back(record(T.rho0, 0.0, T.params, T.diag.nu, ro));
    }
    return traj;
}

bool Stepper::step(SolutionTrajectory& traj) const {
    const auto& T = *tab_;
    const int k = traj.steps();
    if (k >= T.K || traj.termination != Termination::completed)
        return false;
    const auto& keep = T.modes->retained_modes();
    const double t_next = (k + 1) * T.config.dt;

    traj.flux_history.push_back(T.divergence(traj.current_hat, traj.current));
    // History j < k enters with W_{k-j}; the newest flux is added below.
    SpectralField base = T.base(k + 1, traj.flux_history, static_cast<std::size_t>(k));
    const double* w0 = T.W_row(0);

    auto update = [&](const std::vector<cplx>& d) {
        SpectralField next = base;
        for (std::size_t i = 0; i < T.active; ++i)
            next[keep[i]] -= w0[i] * d[i];
        next[0] = T.rho0_hat[0];
        return next;
    };
    SpectralField next = update(traj.flux_history.back());
    PhysicalField rho = inverse(next);
    if (T.config.nonlinear) {
        for (int c = 0; c < T.config.corrector_passes && rho.all_finite(); ++c) {
            next = update(T.divergence(next, rho));
            rho = inverse(next);
        }
    }

    traj.times.push_back(t_next);
    bool finite = rho.all_finite();
    double ratio = finite ? lp_norm(rho, INFINITY) / traj.initial_linf : INFINITY;
    if (!finite) {
        double worst = 1.0;
        for (const auto& d : traj.diagnostics)
            worst = std::max(worst, d.maxnorm_ratio);
        traj.termination = worst > 100.0 ? Termination::blowup_detected : Termination::non_finite;
    } else if (ratio > T.config.blowup_guard) {
        traj.termination = Termination::blowup_detected;
    } else {
        traj.last_valid_time = t_next;
    }
    if (finite && T.diag.record) {
        RecordOptions ro{T.diag.extra_p, traj.initial_linf, T.rho0_hat[0].real(), &T.weight};
        traj.diagnostics.push_back(record(rho, t_next, T.params, T.diag.nu, ro));
    }
    bool last = (k + 1 == T.K) || traj.termination != Termination::completed;
    if (finite && ((k + 1) % T.config.snapshot_stride == 0 || last))
        traj.snapshots.push_back({k + 1, t_next, rho});
    traj.current = std::move(rho);
    traj.current_hat = std::move(next);
    return traj.termination == Termination::completed && k + 1 < T.K;
}

struct PicardAccess {
    static const Stepper::Tables& tables(const Stepper& s) { return *s.tab_; }
};

SolutionTrajectory run(const PhysicalField& rho0, const ModelParams& params,
                       const SolverConfig& config, const DiagnosticsOptions& diag) {
    Stepper stepper(rho0, params, config, diag);
    SolutionTrajectory traj = stepper.start();
    while (stepper.step(traj)) {
    }
    return traj;
}

PicardResult picard_refine(const std::vector<PhysicalField>& guess, const PhysicalField& rho0,
                           const ModelParams& params, const SolverConfig& config) {
    DiagnosticsOptions diag;
    diag.record = false;
    Stepper stepper(rho0, params, config, diag);
    const auto& T = PicardAccess::tables(stepper);
    const int K = T.K;
    const std::vector<std::vector<cplx>> none;

    PicardResult res;
    std::vector<SpectralField> uh(K + 1);
    if (guess.empty()) {
        for (int k = 0; k <= K; ++k) {
            uh[k] = T.base(k, none, 0);
            res.states.push_back(k == 0 ? rho0 : inverse(uh[k]));
        }
    } else {
        if (static_cast<int>(guess.size()) != K + 1)
            throw ParameterError("picard_refine: guess must hold K + 1 states");
        res.states = guess;
        res.states[0] = rho0;
        for (int k = 0; k <= K; ++k)
            uh[k] = forward(res.states[k]);
    }
    uh[0] = T.rho0_hat;

    int bad = 0;
    double prev = 0.0;
    for (int it = 1; it <= config.picard_max_iter; ++it) {
        std::vector<std::vector<cplx>> D(K);
        for (int j = 0; j < K; ++j)
            D[j] = T.divergence(uh[j], res.states[j]);
        double diff = 0.0, scale = 0.0;
        std::vector<PhysicalField> next(K + 1);
        next[0] = rho0;
        for (int k = 1; k <= K; ++k) {
            SpectralField nh = T.base(k, D, static_cast<std::size_t>(k));
            nh[0] = T.rho0_hat[0];
            next[k] = inverse(nh);
            uh[k] = std::move(nh);
            PhysicalField d = next[k];
            for (std::size_t i = 0; i < d.size(); ++i)
                d[i] -= res.states[k][i];
            diff = std::max(diff, lp_norm(d, 2.0));
            scale = std::max(scale, lp_norm(next[k], 2.0));
        }
        res.states = std::move(next);
        res.differences.push_back(diff);
        res.iterations = it;
        if (it > 1 && prev > 0.0) {
            double r = diff / prev;
            res.ratios.push_back(r);
            bad = r >= 1.0 ? bad + 1 : 0;
            if (bad >= 3)
                throw ContractionFailure("picard_refine: contraction ratio >= 1 for 3 iterations");
        }
        if (!std::isfinite(diff))
            throw ContractionFailure("picard_refine: iterates became non-finite");
        if (diff <= config.picard_tol * scale) {
            res.converged = true;
            break;
        }
        prev = diff;
    }
    return res;
}

}  // namespace fks
