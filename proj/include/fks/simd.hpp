#pragma once

#include <complex>
#include <cstddef>

// Inner loops of the solver with a scalar reference and vectorised variants.
// The active variant is picked once from the CPU features; FKS_SIMD=scalar
// forces the reference path.
namespace fks::simd {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
// Throws ParameterError if the backend is not supported by this CPU.
void set_backend(Backend b);

// acc[i] += w[i] * x[i]
void accumulate_scaled(const double* w, const cplx* x, cplx* acc, std::size_t n);
// out[i] = w[i] * x[i]
void scale(const double* w, const cplx* x, cplx* out, std::size_t n);
// out[i] = a[i] * b[i]
void multiply(const double* a, const double* b, double* out, std::size_t n);
double sum(const double* a, std::size_t n);
double sum_abs(const double* a, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
double min_value(const double* a, std::size_t n);

struct Kernels {
    void (*accumulate_scaled)(const double*, const cplx*, cplx*, std::size_t);
    void (*scale)(const double*, const cplx*, cplx*, std::size_t);
    void (*multiply)(const double*, const double*, double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sum_abs)(const double*, std::size_t);
    double (*sum_squares)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*min_value)(const double*, std::size_t);
};

// Direct access to one variant, for equivalence tests.
const Kernels& kernels(Backend b);

}  // namespace fks::simd
