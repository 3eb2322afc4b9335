#pragma once

// Data-parallel double-precision kernels behind all training math.
//
// Every kernel has a scalar reference implementation and, on x86-64 with
// AVX2, a vectorized variant. The active table is picked once at startup
// from CPUID and can be overridden with OSIL_SIMD=scalar|avx2|auto or
// force_isa(). Elementwise kernels (axpy, scale, lerp, adam_update) are
// bit-identical between the two tables because neither side contracts
// mul+add into FMA; reductions (dot, sum, sum_sq) differ only by
// summation order and are equivalence-tested under a tight relative
// tolerance.

#include <cstddef>
#include <string>

namespace osil::simd {

struct Kernels {
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*sum_sq)(const double* x, std::size_t n);

    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x[i] *= a
    void (*scale)(double a, double* x, std::size_t n);
    // target[i] = (1 - w) * target[i] + w * online[i]
    void (*lerp)(const double* online, double* target, double w, std::size_t n);
    // Adam moment + parameter update with precomputed bias corrections
    // inv_bc1 = 1/(1 - beta1^t), inv_bc2 = 1/(1 - beta2^t):
    //   m = b1*m + (1-b1)*g
    //   v = b2*v + (1-b2)*g*g
    //   p -= lr * (m*inv_bc1) / (sqrt(v*inv_bc2) + eps)
    void (*adam_update)(double* p, double* m, double* v, const double* g,
                        double lr, double beta1, double beta2, double eps,
                        double inv_bc1, double inv_bc2, std::size_t n);
};

enum class Isa { scalar, avx2 };

const Kernels& scalar_kernels();

// nullptr when AVX2 is unavailable (non-x86 build or missing CPU support).
const Kernels* avx2_kernels();

// Active table: AVX2 when supported, scalar otherwise, honoring OSIL_SIMD.
const Kernels& active();

// Test hook; throws ConfigError when the requested ISA is unavailable.
void force_isa(Isa isa);
void reset_isa();

std::string active_name();

}  // namespace osil::simd
