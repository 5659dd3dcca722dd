#include "dftlab/simd/kernels.hpp"

#include <complex>

namespace dftlab::simd {
namespace {

void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            const double* ar = a + i * lda;
            const double* br = b + j * ldb;
            for (std::size_t p = 0; p < k; ++p) s += ar[p] * br[p];
            c[i * ldc + j] = s;
        }
}

void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* cr = c + i * ldc;
        for (std::size_t j = 0; j < n; ++j) cr[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double s = a[i * lda + p];
            const double* br = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) cr[j] += s * br[j];
        }
    }
}

using cd = std::complex<double>;

void jost_sweep_scalar(std::size_t n, const double* v, const SweepBatch& bt, const SweepOut& out) {
    for (std::size_t l = 0; l < 4; ++l) {
        const std::size_t last = n - 1;
        const cd e(bt.e_re[l], bt.e_im[l]), kh(bt.kh_re[l], bt.kh_im[l]);
        cd I = 0.0, B = 0.0, J = 0.0;
        cd g1 = v[last], g2 = 0.0, g3 = 0.0;  // g at i+1, i+2, i+3
        out.m_re[last * 4 + l] = 1.0;
        out.m_im[last * 4 + l] = 0.0;
        out.d_re[last * 4 + l] = 0.0;
        out.d_im[last * 4 + l] = 0.0;
        for (std::size_t i = last; i-- > 0;) {
            const std::size_t rem = last - i;
            const int kind = rem >= 3 ? 0 : rem == 2 ? 1 : 2;
            auto al = [&](int j) { return cd(bt.alpha_re[kind][j][l], bt.alpha_im[kind][j][l]); };
            auto ga = [&](int j) { return cd(bt.gamma_re[kind][j][l], bt.gamma_im[kind][j][l]); };
            const double* be = bt.beta[kind];
            cd A = al(1) * g1 + al(2) * g2 + al(3) * g3;
            cd P = ga(1) * g1 + ga(2) * g2 + ga(3) * g3;
            cd Q = be[1] * g1 + be[2] * g2 + be[3] * g3;
            const cd a0v = al(0) * v[i];
            const cd ipart = A + e * I + kh * B;
            I = (ipart + a0v) / (1.0 - a0v);
            const cd m = 1.0 + I;
            const cd g = v[i] * m;
            B = Q + be[0] * g + B;
            J = P + ga(0) * g + e * J;
            g3 = g2;
            g2 = g1;
            g1 = g;
            out.m_re[i * 4 + l] = m.real();
            out.m_im[i * 4 + l] = m.imag();
            out.d_re[i * 4 + l] = -J.real();
            out.d_im[i * 4 + l] = -J.imag();
        }
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", gemm_nt_scalar, gemm_nn_scalar, jost_sweep_scalar};
    return table;
}

}  // namespace dftlab::simd
