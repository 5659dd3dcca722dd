#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "dftlab/simd/kernels.hpp"

namespace dftlab::simd {

#ifndef DFTLAB_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

bool supported(Isa isa) { return isa == Isa::scalar || (avx2_kernels() != nullptr && cpu_has_avx2()); }

std::atomic<int>& current() {
    static std::atomic<int> isa{static_cast<int>(detect_isa())};
    return isa;
}

}  // namespace

Isa detect_isa() {
    if (const char* env = std::getenv("DFTLAB_ISA")) {
        const std::string s(env);
        if (s == "scalar") return Isa::scalar;
        if (s == "avx2" && supported(Isa::avx2)) return Isa::avx2;
    }
    return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return static_cast<Isa>(current().load()); }

const KernelTable& active_kernels() { return active_isa() == Isa::avx2 ? *avx2_kernels() : scalar_kernels(); }

void select_isa(Isa isa) {
    if (!supported(isa)) throw std::runtime_error("instruction set '" + to_string(isa) + "' not available");
    current().store(static_cast<int>(isa));
}

}  // namespace dftlab::simd
