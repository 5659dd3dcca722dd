#pragma once

#include <cstddef>
#include <string>

namespace dftlab::simd {

/// Coefficients of the backward Jost sweep on a uniform radial grid for up
/// to four wavenumbers at once ([.. ][lane]).
///
/// Panel kind 0 is the generic panel with a cubic stencil {i..i+3}; kinds 1
/// and 2 are the last two panels where the stencil is clipped at r_max to a
/// quadratic and a linear one. alpha, gamma, beta are the integrals over
/// [0, h] of K(s) L_j(s), e^{2iks} L_j(s) and L_j(s), with
/// K(s) = (e^{2iks} - 1) / (2ik).
struct SweepBatch {
    std::size_t lanes = 0;
    alignas(32) double alpha_re[3][4][4]{};
    alignas(32) double alpha_im[3][4][4]{};
    alignas(32) double gamma_re[3][4][4]{};
    alignas(32) double gamma_im[3][4][4]{};
    alignas(32) double beta[3][4]{};
    alignas(32) double e_re[4]{};   // e^{2ikh}
    alignas(32) double e_im[4]{};
    alignas(32) double kh_re[4]{};  // K(h)
    alignas(32) double kh_im[4]{};
};

/// Output rows, each of length 4 n laid out as [node * 4 + lane].
/// d holds dm/dr.
struct SweepOut {
    double* m_re;
    double* m_im;
    double* d_re;
    double* d_im;
};

struct KernelTable {
    const char* name;
    /// C[i][j] = sum_p A[i][p] B[j][p]  (C = A B^T), C is m x n.
    void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc);
    /// C[i][j] = sum_p A[i][p] B[p][j]  (C = A B), C is m x n.
    void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc);
    /// Backward sweep over n >= 2 uniform nodes with potential samples v.
    void (*jost_sweep)(std::size_t n, const double* v, const SweepBatch& batch, const SweepOut& out);
};

enum class Isa { scalar, avx2 };

std::string to_string(Isa isa);

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

/// True when the running CPU supports AVX2 and FMA.
bool cpu_has_avx2();

/// Best supported variant, unless DFTLAB_ISA=scalar|avx2 overrides it.
Isa detect_isa();

/// Process-wide kernel table; first use runs detect_isa().
const KernelTable& active_kernels();
Isa active_isa();
/// Forces a variant (tests, benchmarks). Throws if unsupported.
void select_isa(Isa isa);

}  // namespace dftlab::simd
