#include "osil/simd/kernels.hpp"

#include <cmath>

// Scalar reference kernels. These define the semantics; the AVX2 table is
// checked against them in tests/test_kernels.cpp.

namespace osil::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void lerp_scalar(const double* online, double* target, double w, std::size_t n) {
    const double keep = 1.0 - w;
    for (std::size_t i = 0; i < n; ++i) target[i] = keep * target[i] + w * online[i];
}

void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        double lr, double beta1, double beta2, double eps,
                        double inv_bc1, double inv_bc2, std::size_t n) {
    const double one_m_b1 = 1.0 - beta1;
    const double one_m_b2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + one_m_b1 * g[i];
        v[i] = beta2 * v[i] + one_m_b2 * (g[i] * g[i]);
        p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{
        "scalar",       dot_scalar,  sum_scalar,  sum_sq_scalar,
        axpy_scalar,    scale_scalar, lerp_scalar, adam_update_scalar,
    };
    return k;
}

}  // namespace osil::simd
