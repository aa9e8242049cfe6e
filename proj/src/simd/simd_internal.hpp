#pragma once

#include "fks/simd.hpp"

namespace fks::simd {

#define FKS_SIMD_DECLARE                                                          \
    void accumulate_scaled(const double* w, const cplx* x, cplx* acc, std::size_t n); \
    void scale(const double* w, const cplx* x, cplx* out, std::size_t n);             \
    void multiply(const double* a, const double* b, double* out, std::size_t n);      \
    double sum(const double* a, std::size_t n);                                       \
    double sum_abs(const double* a, std::size_t n);                                   \
    double sum_squares(const double* a, std::size_t n);                               \
    double max_abs(const double* a, std::size_t n);                                   \
    double min_value(const double* a, std::size_t n);

namespace scalar {
FKS_SIMD_DECLARE
}
namespace avx2 {
FKS_SIMD_DECLARE
}

#undef FKS_SIMD_DECLARE

}  // namespace fks::simd
