#include "osil/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "osil/core/errors.hpp"

namespace osil::simd {

#if defined(__x86_64__)
const Kernels* avx2_kernels_impl();  // defined in kernels_avx2.cpp

const Kernels* avx2_kernels() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    return avx2_kernels_impl();
}
#else
const Kernels* avx2_kernels() { return nullptr; }
#endif

namespace {

const Kernels* select_from_env() {
    const char* env = std::getenv("OSIL_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        if (std::strcmp(env, "avx2") == 0) {
            const Kernels* k = avx2_kernels();
            if (k == nullptr) throw ConfigError("OSIL_SIMD=avx2 but AVX2 is unavailable");
            return k;
        }
        if (std::strcmp(env, "auto") != 0)
            throw ConfigError(std::string("unknown OSIL_SIMD value: ") + env);
    }
    const Kernels* k = avx2_kernels();
    return k != nullptr ? k : &scalar_kernels();
}

std::atomic<const Kernels*> g_forced{nullptr};

}  // namespace

const Kernels& active() {
    const Kernels* forced = g_forced.load(std::memory_order_acquire);
    if (forced != nullptr) return *forced;
    static const Kernels* selected = select_from_env();
    return *selected;
}

void force_isa(Isa isa) {
    if (isa == Isa::scalar) {
        g_forced.store(&scalar_kernels(), std::memory_order_release);
        return;
    }
    const Kernels* k = avx2_kernels();
    if (k == nullptr) throw ConfigError("force_isa(avx2): AVX2 unavailable on this host");
    g_forced.store(k, std::memory_order_release);
}

void reset_isa() { g_forced.store(nullptr, std::memory_order_release); }

std::string active_name() { return active().name; }

}  // namespace osil::simd
