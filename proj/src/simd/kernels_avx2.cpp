// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "dftlab/simd/kernels.hpp"

namespace dftlab::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

template <int MR, int NR>
void tile_nt(std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
             std::size_t ldc) {
    __m256d acc[MR][NR];
    for (int i = 0; i < MR; ++i)
        for (int j = 0; j < NR; ++j) acc[i][j] = _mm256_setzero_pd();
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        __m256d bv[NR];
        for (int j = 0; j < NR; ++j) bv[j] = _mm256_loadu_pd(b + j * ldb + p);
        for (int i = 0; i < MR; ++i) {
            const __m256d av = _mm256_loadu_pd(a + i * lda + p);
            for (int j = 0; j < NR; ++j) acc[i][j] = _mm256_fmadd_pd(av, bv[j], acc[i][j]);
        }
    }
    for (int i = 0; i < MR; ++i)
        for (int j = 0; j < NR; ++j) {
            double s = hsum(acc[i][j]);
            for (std::size_t q = p; q < k; ++q) s += a[i * lda + q] * b[j * ldb + q];
            c[i * ldc + j] = s;
        }
}

template <int NR>
void rows_nt(std::size_t m, std::size_t k, const double* a, std::size_t lda, const double* b, std::size_t ldb,
             double* c, std::size_t ldc) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) tile_nt<4, NR>(k, a + i * lda, lda, b, ldb, c + i * ldc, ldc);
    switch (m - i) {
        case 3: tile_nt<3, NR>(k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
        case 2: tile_nt<2, NR>(k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
        case 1: tile_nt<1, NR>(k, a + i * lda, lda, b, ldb, c + i * ldc, ldc); break;
        default: break;
    }
}

void gemm_nt_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc) {
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) rows_nt<2>(m, k, a, lda, b + j * ldb, ldb, c + j, ldc);
    if (j < n) rows_nt<1>(m, k, a, lda, b + j * ldb, ldb, c + j, ldc);
}

void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc) {
    constexpr std::size_t kCols = 512, kDepth = 256;
    for (std::size_t i = 0; i < m; ++i) std::fill(c + i * ldc, c + i * ldc + n, 0.0);
    for (std::size_t jb = 0; jb < n; jb += kCols) {
        const std::size_t je = std::min(n, jb + kCols);
        for (std::size_t pb = 0; pb < k; pb += kDepth) {
            const std::size_t pe = std::min(k, pb + kDepth);
            for (std::size_t i = 0; i < m; ++i) {
                double* cr = c + i * ldc;
                const double* ar = a + i * lda;
                std::size_t j = jb;
                for (; j + 8 <= je; j += 8) {
                    __m256d c0 = _mm256_loadu_pd(cr + j), c1 = _mm256_loadu_pd(cr + j + 4);
                    for (std::size_t p = pb; p < pe; ++p) {
                        const __m256d s = _mm256_broadcast_sd(ar + p);
                        const double* br = b + p * ldb + j;
                        c0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(br), c0);
                        c1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(br + 4), c1);
                    }
                    _mm256_storeu_pd(cr + j, c0);
                    _mm256_storeu_pd(cr + j + 4, c1);
                }
                for (; j < je; ++j) {
                    double s = cr[j];
                    for (std::size_t p = pb; p < pe; ++p) s += ar[p] * b[p * ldb + j];
                    cr[j] = s;
                }
            }
        }
    }
}

struct CVec {
    __m256d re, im;
};

inline CVec cmul(CVec a, CVec b) {
    return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
            _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}
inline CVec cadd(CVec a, CVec b) { return {_mm256_add_pd(a.re, b.re), _mm256_add_pd(a.im, b.im)}; }
inline CVec cscale(CVec a, __m256d s) { return {_mm256_mul_pd(a.re, s), _mm256_mul_pd(a.im, s)}; }
inline CVec cload(const double* re, const double* im) { return {_mm256_load_pd(re), _mm256_load_pd(im)}; }

void jost_sweep_avx2(std::size_t n, const double* v, const SweepBatch& bt, const SweepOut& out) {
    const std::size_t last = n - 1;
    const CVec e = cload(bt.e_re, bt.e_im), kh = cload(bt.kh_re, bt.kh_im);
    const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
    CVec I{zero, zero}, B{zero, zero}, J{zero, zero};
    CVec g1{_mm256_set1_pd(v[last]), zero}, g2{zero, zero}, g3{zero, zero};
    _mm256_storeu_pd(out.m_re + last * 4, one);
    _mm256_storeu_pd(out.m_im + last * 4, zero);
    _mm256_storeu_pd(out.d_re + last * 4, zero);
    _mm256_storeu_pd(out.d_im + last * 4, zero);
    for (std::size_t i = last; i-- > 0;) {
        const std::size_t rem = last - i;
        const int kind = rem >= 3 ? 0 : rem == 2 ? 1 : 2;
        auto al = [&](int j) { return cload(bt.alpha_re[kind][j], bt.alpha_im[kind][j]); };
        auto ga = [&](int j) { return cload(bt.gamma_re[kind][j], bt.gamma_im[kind][j]); };
        const double* be = bt.beta[kind];
        const CVec A = cadd(cadd(cmul(al(1), g1), cmul(al(2), g2)), cmul(al(3), g3));
        const CVec P = cadd(cadd(cmul(ga(1), g1), cmul(ga(2), g2)), cmul(ga(3), g3));
        const CVec Q = cadd(cadd(cscale(g1, _mm256_set1_pd(be[1])), cscale(g2, _mm256_set1_pd(be[2]))),
                            cscale(g3, _mm256_set1_pd(be[3])));
        const __m256d vi = _mm256_set1_pd(v[i]);
        const CVec a0v = cscale(al(0), vi);
        const CVec num = cadd(cadd(cadd(A, cmul(e, I)), cmul(kh, B)), a0v);
        const CVec den{_mm256_sub_pd(one, a0v.re), _mm256_sub_pd(zero, a0v.im)};
        const __m256d inv = _mm256_div_pd(one, _mm256_fmadd_pd(den.re, den.re, _mm256_mul_pd(den.im, den.im)));
        I = {_mm256_mul_pd(_mm256_fmadd_pd(num.re, den.re, _mm256_mul_pd(num.im, den.im)), inv),
             _mm256_mul_pd(_mm256_fmsub_pd(num.im, den.re, _mm256_mul_pd(num.re, den.im)), inv)};
        const CVec m{_mm256_add_pd(one, I.re), I.im};
        const CVec g = cscale(m, vi);
        B = cadd(cadd(Q, cscale(g, _mm256_set1_pd(be[0]))), B);
        J = cadd(cadd(P, cmul(ga(0), g)), cmul(e, J));
        g3 = g2;
        g2 = g1;
        g1 = g;
        _mm256_storeu_pd(out.m_re + i * 4, m.re);
        _mm256_storeu_pd(out.m_im + i * 4, m.im);
        _mm256_storeu_pd(out.d_re + i * 4, _mm256_sub_pd(zero, J.re));
        _mm256_storeu_pd(out.d_im + i * 4, _mm256_sub_pd(zero, J.im));
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{"avx2", gemm_nt_avx2, gemm_nn_avx2, jost_sweep_avx2};
    return &table;
}

}  // namespace dftlab::simd
