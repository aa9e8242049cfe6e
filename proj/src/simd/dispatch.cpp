#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "fks/errors.hpp"
#include "simd_internal.hpp"

namespace fks::simd {

namespace {

const Kernels kScalar = {scalar::accumulate_scaled, scalar::scale,    scalar::multiply,
                         scalar::sum,               scalar::sum_abs,  scalar::sum_squares,
                         scalar::max_abs,           scalar::min_value};

#ifdef FKS_HAVE_AVX2
const Kernels kAvx2 = {avx2::accumulate_scaled, avx2::scale,    avx2::multiply,
                       avx2::sum,               avx2::sum_abs,  avx2::sum_squares,
                       avx2::max_abs,           avx2::min_value};
#else
const Kernels kAvx2 = kScalar;
#endif

bool cpu_has_avx2() {
#ifdef FKS_HAVE_AVX2
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    const char* env = std::getenv("FKS_SIMD");
    if (env && std::strcmp(env, "scalar") == 0)
        return Backend::scalar;
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{initial_backend()};
    return b;
}

const Kernels& table() { return kernels(current().load(std::memory_order_relaxed)); }

}  // namespace

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(); }

void set_backend(Backend b) {
    if (!backend_available(b))
        throw ParameterError(std::string("SIMD backend not supported on this CPU: ") +
                             backend_name(b));
    current().store(b);
}

const Kernels& kernels(Backend b) { return b == Backend::avx2 ? kAvx2 : kScalar; }

void accumulate_scaled(const double* w, const cplx* x, cplx* acc, std::size_t n) {
    table().accumulate_scaled(w, x, acc, n);
}
void scale(const double* w, const cplx* x, cplx* out, std::size_t n) { table().scale(w, x, out, n); }
void multiply(const double* a, const double* b, double* out, std::size_t n) {
    table().multiply(a, b, out, n);
}
double sum(const double* a, std::size_t n) { return table().sum(a, n); }
double sum_abs(const double* a, std::size_t n) { return table().sum_abs(a, n); }
double sum_squares(const double* a, std::size_t n) { return table().sum_squares(a, n); }
double max_abs(const double* a, std::size_t n) { return table().max_abs(a, n); }
double min_value(const double* a, std::size_t n) { return table().min_value(a, n); }

}  // namespace fks::simd
