#include <gtest/gtest.h>

#include <cmath>

#include "fks/errors.hpp"
#include "fks/integrator.hpp"
#include "fks/simd.hpp"

using namespace fks;

namespace {

PhysicalField gaussian(const GridSpec& g, double mass, double sigma, double x0 = 0.0) {
    return sample(g, [=](std::span<const double> x) {
        double r2 = (x[0] - x0) * (x[0] - x0) + x[1] * x[1];
        return mass * std::exp(-r2 / (2 * sigma * sigma)) / (2 * M_PI * sigma * sigma);
    });
}

ModelParams params(double beta, double alpha, double gamma = 2.0) {
    ModelParams p;
    p.beta = beta;
    p.alpha = alpha;
    p.gamma_pot = gamma;
    return p;
}

SolverConfig solver(double dt, double t_end, int corr = 1) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.corrector_passes = corr;
    return c;
}

double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

const GridSpec kGrid{2, 64, 16.0, 2.0 / 3.0};

}  // namespace

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.steps(), 100);
    auto bad = [](auto mutate) {
        SolverConfig s;
        mutate(s);
        EXPECT_THROW(s.validate(), ParameterError);
    };
    bad([](SolverConfig& s) { s.dt = 0.0; });
    bad([](SolverConfig& s) { s.t_end = -1.0; });
    bad([](SolverConfig& s) { s.corrector_passes = -1; });
    bad([](SolverConfig& s) { s.snapshot_stride = 0; });
    bad([](SolverConfig& s) { s.blowup_guard = 0.5; });
    bad([](SolverConfig& s) { s.picard_tol = 0.0; });
    EXPECT_STREQ(termination_name(Termination::non_finite), "non_finite");
    EXPECT_STREQ(termination_name(Termination::blowup_detected), "blowup_detected");
}

TEST(Stepper, LinearModesFollowMittagLeffler) {
    ModelParams p = params(0.6, 1.7);
    SolverConfig c = solver(1.0 / 32, 1.0);
    c.nonlinear = false;
    PhysicalField rho0 = gaussian(kGrid, 1.0, 1.0);
    SolutionTrajectory tr = run(rho0, p, c);
    ASSERT_EQ(tr.termination, Termination::completed);
    SpectralField exact = apply_S(forward(rho0), 1.0, p);
    EXPECT_LE(max_abs_diff(tr.current, inverse(exact)), 1e-13);
}

TEST(Stepper, RelaxationAndWeightsMatchClosedForms) {
    ModelParams p = params(0.7, 1.5);
    SolverConfig c = solver(0.05, 1.0);
    Stepper st(gaussian(kGrid, 1.0, 1.0), p, c);
    auto mt = mode_table(kGrid);
    const auto& kept = mt->retained_modes();
    const double unit = mt->wavenumber_unit();
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, kept.size() / 2, kept.size() - 1}) {
        const std::size_t m = kept[i];
        const double lam = std::pow(mt->k2(m) * unit * unit, p.alpha / 2);
        for (int k : {1, 7, 20}) {
            const double t = k * c.dt;
            EXPECT_NEAR(st.relaxation(k, m), eval_ml(MLOrder{p.beta, 1.0}, lam * std::pow(t, p.beta)), 1e-13);
            double w = st.weight(k - 1, i);
            double ref = kernel_increment(p.beta, lam, t, 0.0, c.dt);
            EXPECT_NEAR(w, ref, 1e-12 * ref) << i << " " << k;
        }
        // Constant forcing telescopes: sum_m W_m = G(t_K).
        double sum = 0.0;
        for (int j = 0; j < 20; ++j)
            sum += st.weight(j, i);
        const double t = 20 * c.dt;
        double G = lam == 0.0 ? std::pow(t, p.beta) / std::tgamma(p.beta + 1)
                              : (1.0 - st.relaxation(20, m)) / lam;
        EXPECT_NEAR(sum, G, 1e-12 * G) << i;
    }
}

TEST(Stepper, ConstantDataIsStationary) {
    ModelParams p = params(0.5, 2.0);
    PhysicalField c0(kGrid, std::vector<double>(kGrid.size(), 0.3));
    SolutionTrajectory tr = run(c0, p, solver(0.1, 1.0));
    ASSERT_EQ(tr.termination, Termination::completed);
    EXPECT_LE(max_abs_diff(tr.current, c0), 1e-15);
}

TEST(Stepper, ZeroModeIsExactlyConserved) {
    ModelParams p = params(0.8, 1.5, 1.5);
    PhysicalField rho0 = gaussian(kGrid, 4.0, 1.0);
    Stepper st(rho0, p, solver(1.0 / 32, 0.5));
    SolutionTrajectory tr = st.start();
    while (st.step(tr))
        EXPECT_EQ(tr.current_hat[0], st.rho0_hat()[0]);
    EXPECT_EQ(tr.termination, Termination::completed);
    EXPECT_NEAR(integrate(tr.current), 4.0, 1e-12);
    EXPECT_EQ(static_cast<int>(tr.flux_history.size()), tr.steps());
    EXPECT_EQ(tr.steps(), 16);
    EXPECT_EQ(tr.diagnostics.size(), 17u);
}

TEST(Stepper, SnapshotStride) {
    SolverConfig c = solver(0.1, 1.0);
    c.snapshot_stride = 3;
    SolutionTrajectory tr = run(gaussian(kGrid, 1.0, 1.0), params(0.5, 2.0), c);
    std::vector<int> idx;
    for (const auto& s : tr.snapshots) {
        idx.push_back(s.step);
        EXPECT_NEAR(s.t, s.step * 0.1, 1e-14);
    }
    EXPECT_EQ(idx, (std::vector<int>{0, 3, 6, 9, 10}));
}

TEST(Stepper, Deterministic) {
    ModelParams p = params(0.6, 1.8);
    PhysicalField rho0 = gaussian(kGrid, 3.0, 0.8, 0.5);
    SolutionTrajectory a = run(rho0, p, solver(0.05, 0.5));
    SolutionTrajectory b = run(rho0, p, solver(0.05, 0.5));
    EXPECT_EQ(a.current.values(), b.current.values());
}

TEST(Stepper, BackendsAgree) {
    if (!simd::backend_available(simd::Backend::avx2))
        GTEST_SKIP() << "AVX2 not available on this CPU";
    ModelParams p = params(0.6, 1.8);
    PhysicalField rho0 = gaussian(kGrid, 3.0, 0.8, 0.5);
    simd::Backend before = simd::active_backend();
    simd::set_backend(simd::Backend::scalar);
    SolutionTrajectory a = run(rho0, p, solver(0.05, 0.5));
    simd::set_backend(simd::Backend::avx2);
    SolutionTrajectory b = run(rho0, p, solver(0.05, 0.5));
    simd::set_backend(before);
    EXPECT_LE(max_abs_diff(a.current, b.current), 1e-12 * lp_norm(a.current, INFINITY));
}

TEST(Stepper, RejectsBadInput) {
    PhysicalField rho0 = gaussian(kGrid, 1.0, 1.0);
    rho0[5] = NAN;
    EXPECT_THROW(Stepper(rho0, params(0.5, 2.0), solver(0.1, 1.0)), ParameterError);
    GridSpec g3{3, 16, 8.0, 2.0 / 3.0};
    PhysicalField r3(g3, std::vector<double>(g3.size(), 1.0));
    EXPECT_THROW(Stepper(r3, params(0.5, 2.0), solver(0.1, 1.0)), ParameterError);
}

TEST(Stepper, GuardFlagsBlowup) {
    ModelParams p = params(0.8, 2.0);
    SolverConfig c = solver(1.0 / 256, 0.5);
    c.blowup_guard = 5.0;
    SolutionTrajectory tr = run(gaussian(GridSpec{2, 64, 20.0, 2.0 / 3.0}, 1.5 * 8 * M_PI, 0.5), p, c);
    ASSERT_EQ(tr.termination, Termination::blowup_detected);
    EXPECT_LT(tr.steps(), c.steps());
    EXPECT_GT(tr.diagnostics.back().maxnorm_ratio, 5.0);
    EXPECT_NEAR(tr.last_valid_time, (tr.steps() - 1) * c.dt, 1e-14);
}

TEST(Stepper, OverflowIsNonFinite) {
    ModelParams p = params(0.8, 2.0);
    SolutionTrajectory tr = run(gaussian(kGrid, 1e200, 1.0), p, solver(0.1, 1.0));
    EXPECT_EQ(tr.termination, Termination::non_finite);
    EXPECT_EQ(tr.last_valid_time, 0.0);
}

TEST(Picard, TrivialCases) {
    ModelParams p = params(0.5, 2.0);
    SolverConfig c = solver(0.1, 0.5);
    PhysicalField zero(kGrid);
    PicardResult z = picard_refine({}, zero, p, c);
    EXPECT_TRUE(z.converged);
    EXPECT_LE(z.iterations, 1);
    c.nonlinear = false;
    PicardResult lin = picard_refine({}, gaussian(kGrid, 1.0, 1.0), p, c);
    EXPECT_TRUE(lin.converged);
    EXPECT_LE(lin.iterations, 1);
}

TEST(Picard, LimitIsTheStepperWithoutCorrector) {
    ModelParams p = params(0.7, 1.8, 1.8);
    SolverConfig c = solver(1.0 / 32, 0.25, 0);
    c.picard_tol = 1e-13;
    PhysicalField rho0 = gaussian(kGrid, 2.0, 1.0);
    PicardResult pr = picard_refine({}, rho0, p, c);
    ASSERT_TRUE(pr.converged);
    ASSERT_EQ(static_cast<int>(pr.states.size()), c.steps() + 1);
    for (double r : pr.ratios)
        EXPECT_LT(r, 1.0);
    SolutionTrajectory tr = run(rho0, p, c);
    EXPECT_LE(max_abs_diff(pr.states.back(), tr.current), 1e-10 * lp_norm(tr.current, INFINITY));
    // A converged trajectory is its own fixed point.
    PicardResult again = picard_refine(pr.states, rho0, p, c);
    EXPECT_TRUE(again.converged);
    EXPECT_LE(again.iterations, 2);
}

TEST(Picard, LargeDataFailsToContract) {
    ModelParams p = params(0.8, 2.0);
    SolverConfig c = solver(1.0 / 16, 2.0, 0);
    EXPECT_THROW(picard_refine({}, gaussian(kGrid, 20 * 8 * M_PI, 0.5), p, c), ContractionFailure);
}
