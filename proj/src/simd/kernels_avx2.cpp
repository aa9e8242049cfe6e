// Compiled with -mavx2 -mfma; only reached after a cpuid check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "simd_internal.hpp"

namespace fks::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

}  // namespace

// Four complex values per iteration: w0 w1 w2 w3 is widened to
// (w0 w0 w1 w1) and (w2 w2 w3 w3) to match the interleaved re/im layout.
void accumulate_scaled(const double* w, const cplx* x, cplx* acc, std::size_t n) {
    const double* xs = reinterpret_cast<const double*>(x);
    double* as = reinterpret_cast<double*>(acc);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d w01 = _mm256_permute4x64_pd(wv, _MM_SHUFFLE(1, 1, 0, 0));
        __m256d w23 = _mm256_permute4x64_pd(wv, _MM_SHUFFLE(3, 3, 2, 2));
        __m256d a0 = _mm256_loadu_pd(as + 2 * i);
        __m256d a1 = _mm256_loadu_pd(as + 2 * i + 4);
        a0 = _mm256_fmadd_pd(w01, _mm256_loadu_pd(xs + 2 * i), a0);
        a1 = _mm256_fmadd_pd(w23, _mm256_loadu_pd(xs + 2 * i + 4), a1);
        _mm256_storeu_pd(as + 2 * i, a0);
        _mm256_storeu_pd(as + 2 * i + 4, a1);
    }
    for (; i < n; ++i) {
        as[2 * i] = std::fma(w[i], xs[2 * i], as[2 * i]);
        as[2 * i + 1] = std::fma(w[i], xs[2 * i + 1], as[2 * i + 1]);
    }
}

void scale(const double* w, const cplx* x, cplx* out, std::size_t n) {
    const double* xs = reinterpret_cast<const double*>(x);
    double* os = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d w01 = _mm256_permute4x64_pd(wv, _MM_SHUFFLE(1, 1, 0, 0));
        __m256d w23 = _mm256_permute4x64_pd(wv, _MM_SHUFFLE(3, 3, 2, 2));
        _mm256_storeu_pd(os + 2 * i, _mm256_mul_pd(w01, _mm256_loadu_pd(xs + 2 * i)));
        _mm256_storeu_pd(os + 2 * i + 4, _mm256_mul_pd(w23, _mm256_loadu_pd(xs + 2 * i + 4)));
    }
    for (; i < n; ++i) {
        os[2 * i] = w[i] * xs[2 * i];
        os[2 * i + 1] = w[i] * xs[2 * i + 1];
    }
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i)
        out[i] = a[i] * b[i];
}

double sum(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_loadu_pd(a + i));
        s1 = _mm256_add_pd(s1, _mm256_loadu_pd(a + i + 4));
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i)
        s += a[i];
    return s;
}

double sum_abs(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_and_pd(kAbsMask, _mm256_loadu_pd(a + i)));
        s1 = _mm256_add_pd(s1, _mm256_and_pd(kAbsMask, _mm256_loadu_pd(a + i + 4)));
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i)
        s += std::abs(a[i]);
    return s;
}

double sum_squares(const double* a, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(a + i);
        __m256d v1 = _mm256_loadu_pd(a + i + 4);
        s0 = _mm256_fmadd_pd(v0, v0, s0);
        s1 = _mm256_fmadd_pd(v1, v1, s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i)
        s = std::fma(a[i], a[i], s);
    return s;
}

double max_abs(const double* a, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        m = _mm256_max_pd(m, _mm256_and_pd(kAbsMask, _mm256_loadu_pd(a + i)));
    double r = hmax(m);
    for (; i < n; ++i)
        r = std::max(r, std::abs(a[i]));
    return r;
}

double min_value(const double* a, std::size_t n) {
    __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        m = _mm256_min_pd(m, _mm256_loadu_pd(a + i));
    double r = hmin(m);
    for (; i < n; ++i)
        r = std::min(r, a[i]);
    return r;
}

}  // namespace fks::simd::avx2
