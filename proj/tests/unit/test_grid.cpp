#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fks/errors.hpp"
#include "fks/grid.hpp"

using namespace fks;

namespace {

PhysicalField random_field(const GridSpec& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhysicalField f(g);
    for (auto& v : f.values())
        v = u(rng);
    return f;
}

double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

PhysicalField unit_gaussian(const GridSpec& g) {
    return sample(g, [](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x)
            r2 += v * v;
        return std::exp(-0.5 * r2);
    });
}

}  // namespace

TEST(GridSpec, Validation) {
    GridSpec g;
    EXPECT_NO_THROW(g.validate());
    EXPECT_DOUBLE_EQ(g.spacing(), 40.0 / 128);
    EXPECT_EQ(g.size(), 128u * 128u);
    EXPECT_EQ(g.spectral_size(), 128u * 65u);
    for (auto bad : {GridSpec{1, 64, 1, 0.5}, GridSpec{2, 63, 1, 0.5}, GridSpec{2, 6, 1, 0.5},
                     GridSpec{2, 64, 0, 0.5}, GridSpec{2, 64, 1, 0}, GridSpec{4, 64, 1, 0.5}})
        EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(Transforms, RoundTrip) {
    for (int n : {2, 3}) {
        GridSpec g{n, n == 2 ? 64 : 16, 10.0, 2.0 / 3.0};
        PhysicalField f = random_field(g, 7);
        PhysicalField back = inverse(forward(f));
        EXPECT_LE(max_abs_diff(f, back), 1e-13 * 1.0);
    }
}

TEST(Transforms, ConstantAndCosine) {
    GridSpec g{2, 32, 6.0, 2.0 / 3.0};
    PhysicalField c(g, std::vector<double>(g.size(), 2.5));
    SpectralField C = forward(c);
    EXPECT_NEAR(C[0].real(), 2.5 * 36.0, 1e-12);
    for (std::size_t m = 1; m < C.size(); ++m)
        EXPECT_LT(std::abs(C[m]), 1e-12);

    PhysicalField cs = sample(g, [](std::span<const double> x) { return std::cos(2 * M_PI * x[0] / 6.0); });
    SpectralField F = forward(cs);
    int k1[2] = {1, 0}, km1[2] = {-1, 0};
    EXPECT_NEAR(std::abs(F.at(k1)), 18.0, 1e-12);
    EXPECT_NEAR(std::abs(F.at(km1)), 18.0, 1e-12);
    double rest = 0.0;
    for (std::size_t m = 0; m < F.size(); ++m)
        rest += std::norm(F[m]);
    EXPECT_NEAR(rest, 2 * 18.0 * 18.0, 1e-9);  // (1,0) and (N-1,0) both stored
    EXPECT_LE(max_abs_diff(inverse(F), cs), 1e-14);
}

TEST(Transforms, GaussianMatchesContinuumTransform) {
    GridSpec g{2, 128, 40.0, 2.0 / 3.0};
    SpectralField F = forward(unit_gaussian(g));
    auto mt = mode_table(g);
    double worst = 0.0;
    for (std::size_t m = 0; m < F.size(); ++m) {
        double xi2 = mt->k2(m) * std::pow(mt->wavenumber_unit(), 2);
        double exact = 2 * M_PI * std::exp(-0.5 * xi2);
        worst = std::max(worst, std::abs(F[m] - exact));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Transforms, LinearAndParseval) {
    GridSpec g{2, 64, 5.0, 2.0 / 3.0};
    PhysicalField a = random_field(g, 1), b = random_field(g, 2), ab(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        ab[i] = 2.0 * a[i] - 3.0 * b[i];
    SpectralField A = forward(a), B = forward(b), AB = forward(ab);
    double worst = 0.0;
    for (std::size_t m = 0; m < A.size(); ++m)
        worst = std::max(worst, std::abs(AB[m] - (2.0 * A[m] - 3.0 * B[m])));
    EXPECT_LT(worst, 1e-12);

    // Full-spectrum sum from the half spectrum: interior last-axis modes count twice.
    const int N = g.points_per_axis;
    double spectral = 0.0;
    for (std::size_t m = 0; m < A.size(); ++m) {
        int k_last = static_cast<int>(m % (N / 2 + 1));
        double w = (k_last == 0 || k_last == N / 2) ? 1.0 : 2.0;
        spectral += w * std::norm(A[m]);
    }
    double phys = std::pow(lp_norm(a, 2.0), 2);
    EXPECT_NEAR(spectral / std::pow(g.side_length, 2), phys, 1e-12 * phys);
}

TEST(Transforms, InverseRejectsNonHermitian) {
    GridSpec g{2, 16, 1.0, 2.0 / 3.0};
    SpectralField F(g);
    F[0] = cplx(0.0, 1.0);  // zero mode must be real
    EXPECT_THROW(inverse(F), DataError);
}

TEST(Quadrature, IntegrateMatchesZeroMode) {
    GridSpec g{2, 128, 40.0, 2.0 / 3.0};
    PhysicalField f = unit_gaussian(g);
    EXPECT_NEAR(integrate(f), 2 * M_PI, 1e-10);
    EXPECT_NEAR(integrate(f), forward(f)[0].real(), 1e-13 * 2 * M_PI);
    PhysicalField one(g, std::vector<double>(g.size(), 1.0));
    EXPECT_NEAR(integrate(one), 1600.0, 1e-10);
    PhysicalField odd = sample(g, [](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); });
    EXPECT_NEAR(integrate(odd), 0.0, 1e-14);
}

TEST(Quadrature, Norms) {
    GridSpec g{2, 128, 40.0, 2.0 / 3.0};
    PhysicalField f = unit_gaussian(g);
    EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(M_PI), 1e-8);
    EXPECT_DOUBLE_EQ(lp_norm(f, INFINITY), 1.0);
    PhysicalField cell(g);
    cell[12345] = 1.0;
    const double h = g.spacing();
    for (double p : {1.0, 1.5, 2.0, 3.0})
        EXPECT_NEAR(lp_norm(cell, p), std::pow(h * h, 1.0 / p), 1e-14);
    PhysicalField scaled = f;
    for (auto& v : scaled.values())
        v *= -3.0;
    EXPECT_NEAR(lp_norm(scaled, 1.7), 3.0 * lp_norm(f, 1.7), 1e-12);
    EXPECT_THROW(lp_norm(f, 0.5), ParameterError);
}

TEST(MomentWeight, Values) {
    GridSpec g{2, 64, 8.0, 2.0 / 3.0};
    PhysicalField w2 = moment_weight(g, 2.0);
    PhysicalField w15 = moment_weight(g, 1.5);
    const int N = g.points_per_axis;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double x = g.coordinate(i), y = g.coordinate(j);
            double r2 = x * x + y * y;
            std::size_t m = static_cast<std::size_t>(i) * N + j;
            EXPECT_NEAR(w2[m], r2, 1e-12 * std::max(1.0, r2));
            EXPECT_GE(w15[m], 0.0);
            EXPECT_LE(w15[m], std::pow(r2, 0.75) + 1e-15);
        }
    }
    EXPECT_EQ(w2[(N / 2) * N + N / 2], 0.0);
    // |x| = 1 at grid point (x, y) = (1, 0)
    std::size_t one = static_cast<std::size_t>(N / 2 + 8) * N + N / 2;
    EXPECT_NEAR(w15[one], std::pow(2.0, 0.75) - 1.0, 1e-14);
    // Nondecreasing away from the origin along an axis.
    for (int i = N / 2; i + 1 < N; ++i)
        EXPECT_LE(w15[static_cast<std::size_t>(i) * N + N / 2], w15[static_cast<std::size_t>(i + 1) * N + N / 2]);
    EXPECT_THROW(moment_weight(g, 1.0), ParameterError);
    EXPECT_THROW(moment_weight(g, 2.5), ParameterError);
}

TEST(ModeTable, RetainedAndShells) {
    GridSpec g{2, 32, 2 * M_PI, 0.5};
    auto mt = mode_table(g);
    EXPECT_EQ(mt.get(), mode_table(g).get());
    EXPECT_DOUBLE_EQ(mt->wavenumber_unit(), 1.0);
    for (std::size_t m = 0; m < mt->size(); ++m) {
        bool keep = std::abs(mt->k(m, 0)) <= 8 && std::abs(mt->k(m, 1)) <= 8;
        EXPECT_EQ(mt->retained(m), keep);
        EXPECT_EQ(mt->shells()[mt->shell(m)], mt->k2(m));
    }
}

TEST(Fks1, RoundTripAndHeader) {
    GridSpec g{2, 16, 3.5, 2.0 / 3.0};
    PhysicalField f = random_field(g, 3);
    auto path = (std::filesystem::temp_directory_path() / "fks_grid_test.fks1").string();
    write_fks1(path, f);
    EXPECT_EQ(std::filesystem::file_size(path), 4u + 4u + 4u + 8u + 8u * g.size());
    PhysicalField r = read_fks1(path);
    EXPECT_EQ(r.grid().points_per_axis, 16);
    EXPECT_EQ(r.grid().side_length, 3.5);
    EXPECT_EQ(r.values(), f.values());
    std::filesystem::remove(path);
    EXPECT_THROW(read_fks1(path), DataError);
}

TEST(EvaluateAt, ReproducesSmoothField) {
    GridSpec g{2, 64, 20.0, 2.0 / 3.0};
    SpectralField F = forward(unit_gaussian(g));
    double x[2] = {0.37, -1.21};
    EXPECT_NEAR(evaluate_at(F, x), std::exp(-0.5 * (0.37 * 0.37 + 1.21 * 1.21)), 1e-12);
}
