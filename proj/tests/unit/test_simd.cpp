#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fks/errors.hpp"
#include "fks/simd.hpp"

using namespace fks;
using simd::Backend;
using simd::cplx;

namespace {

struct Data {
    std::vector<double> a, b;
    std::vector<cplx> z, acc;
};

Data make(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Data d;
    for (std::size_t i = 0; i < n; ++i) {
        d.a.push_back(u(rng));
        d.b.push_back(u(rng));
        d.z.emplace_back(u(rng), u(rng));
        d.acc.emplace_back(u(rng), u(rng));
    }
    return d;
}

// Lengths straddling the vector width and its remainders.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 1000, 1027};

}  // namespace

class SimdEquivalence : public ::testing::Test {
  protected:
    void SetUp() override {
        if (!simd::backend_available(Backend::avx2))
            GTEST_SKIP() << "AVX2 not available on this CPU";
    }
    const simd::Kernels& ref = simd::kernels(Backend::scalar);
    const simd::Kernels& vec = simd::kernels(Backend::avx2);
};

TEST_F(SimdEquivalence, ElementwiseKernelsAreExact) {
    for (std::size_t n : kLengths) {
        Data d = make(n, 11 + n);
        std::vector<cplx> r1 = d.acc, r2 = d.acc;
        ref.accumulate_scaled(d.a.data(), d.z.data(), r1.data(), n);
        vec.accumulate_scaled(d.a.data(), d.z.data(), r2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            // FMA may differ from multiply-then-add in the last bit.
            EXPECT_NEAR(r1[i].real(), r2[i].real(), 1e-15 * (1 + std::abs(r1[i].real())));
            EXPECT_NEAR(r1[i].imag(), r2[i].imag(), 1e-15 * (1 + std::abs(r1[i].imag())));
        }
        std::vector<cplx> s1(n), s2(n);
        ref.scale(d.a.data(), d.z.data(), s1.data(), n);
        vec.scale(d.a.data(), d.z.data(), s2.data(), n);
        EXPECT_EQ(s1, s2);
        std::vector<double> m1(n), m2(n);
        ref.multiply(d.a.data(), d.b.data(), m1.data(), n);
        vec.multiply(d.a.data(), d.b.data(), m2.data(), n);
        EXPECT_EQ(m1, m2);
    }
}

TEST_F(SimdEquivalence, ReductionsAgree) {
    for (std::size_t n : kLengths) {
        Data d = make(n, 5 + n);
        const double* a = d.a.data();
        double scale = 1e-15 * (n + 1) * 2.0;
        EXPECT_NEAR(ref.sum(a, n), vec.sum(a, n), scale);
        EXPECT_NEAR(ref.sum_abs(a, n), vec.sum_abs(a, n), scale);
        EXPECT_NEAR(ref.sum_squares(a, n), vec.sum_squares(a, n), 2 * scale);
        EXPECT_EQ(ref.max_abs(a, n), vec.max_abs(a, n));
        if (n > 0)
            EXPECT_EQ(ref.min_value(a, n), vec.min_value(a, n));
    }
}

TEST(SimdDispatch, ScalarReferenceValues) {
    const auto& k = simd::kernels(Backend::scalar);
    double a[5] = {1, -4, 2, 0.5, -1};
    EXPECT_EQ(k.sum(a, 5), -1.5);
    EXPECT_EQ(k.sum_abs(a, 5), 8.5);
    EXPECT_EQ(k.sum_squares(a, 5), 22.25);
    EXPECT_EQ(k.max_abs(a, 5), 4.0);
    EXPECT_EQ(k.min_value(a, 5), -4.0);
    cplx z[2] = {{1, 2}, {3, -1}};
    cplx acc[2] = {{0, 0}, {1, 1}};
    double w[2] = {2, -1};
    k.accumulate_scaled(w, z, acc, 2);
    EXPECT_EQ(acc[0], cplx(2, 4));
    EXPECT_EQ(acc[1], cplx(-2, 2));
}

TEST(SimdDispatch, SwitchingBackends) {
    Backend before = simd::active_backend();
    simd::set_backend(Backend::scalar);
    EXPECT_EQ(simd::active_backend(), Backend::scalar);
    EXPECT_STREQ(simd::backend_name(Backend::scalar), "scalar");
    if (simd::backend_available(Backend::avx2)) {
        simd::set_backend(Backend::avx2);
        EXPECT_EQ(simd::active_backend(), Backend::avx2);
    } else {
        EXPECT_THROW(simd::set_backend(Backend::avx2), ParameterError);
    }
    simd::set_backend(before);
}
