#include <algorithm>
#include <cmath>
#include <limits>

#include "simd_internal.hpp"

namespace fks::simd::scalar {

void accumulate_scaled(const double* w, const cplx* x, cplx* acc, std::size_t n) {
    const double* xs = reinterpret_cast<const double*>(x);
    double* as = reinterpret_cast<double*>(acc);
    for (std::size_t i = 0; i < n; ++i) {
        as[2 * i] += w[i] * xs[2 * i];
        as[2 * i + 1] += w[i] * xs[2 * i + 1];
    }
}

void scale(const double* w, const cplx* x, cplx* out, std::size_t n) {
    const double* xs = reinterpret_cast<const double*>(x);
    double* os = reinterpret_cast<double*>(out);
    for (std::size_t i = 0; i < n; ++i) {
        os[2 * i] = w[i] * xs[2 * i];
        os[2 * i + 1] = w[i] * xs[2 * i + 1];
    }
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a[i] * b[i];
}

double sum(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i];
    return s;
}

double sum_abs(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += std::abs(a[i]);
    return s;
}

double sum_squares(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * a[i];
    return s;
}

double max_abs(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a[i]));
    return m;
}

double min_value(const double* a, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        m = std::min(m, a[i]);
    return m;
}

}  // namespace fks::simd::scalar
