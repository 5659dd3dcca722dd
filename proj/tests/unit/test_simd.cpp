#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dftlab/jost/jost.hpp"
#include "dftlab/jost/moments.hpp"
#include "dftlab/potentials/potential.hpp"
#include "dftlab/simd/kernels.hpp"

using namespace dftlab;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

struct IsaGuard {
    simd::Isa saved = simd::active_isa();
    ~IsaGuard() { simd::select_isa(saved); }
};

}  // namespace

TEST_CASE("scalar gemm against a naive triple loop") {
    std::mt19937_64 rng(7);
    const std::size_t m = 13, n = 9, k = 21, lda = 24, ldb = 22, ldc = 11;
    const auto a = random_vector(m * lda, rng), b = random_vector(n * ldb, rng), bn = random_vector(k * ldc, rng);
    std::vector<double> c(m * ldc, 0.0);
    simd::scalar_kernels().gemm_nt(m, n, k, a.data(), lda, b.data(), ldb, c.data(), ldc);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * lda + p] * b[j * ldb + p];
            CHECK(c[i * ldc + j] == doctest::Approx(s).epsilon(1e-14));
        }
    std::vector<double> d(m * ldc, 0.0);
    simd::scalar_kernels().gemm_nn(m, n, k, a.data(), lda, bn.data(), ldc, d.data(), ldc);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * lda + p] * bn[p * ldc + j];
            CHECK(d[i * ldc + j] == doctest::Approx(s).epsilon(1e-14));
        }
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    const auto* avx = simd::avx2_kernels();
    if (!avx || !simd::cpu_has_avx2()) {
        MESSAGE("AVX2 variant unavailable; equivalence not exercised");
        return;
    }
    std::mt19937_64 rng(11);
    for (auto [m, n, k] : {std::array<std::size_t, 3>{1, 1, 1}, {37, 29, 131}, {64, 64, 512}, {5, 70, 3}}) {
        const std::size_t lda = k + 3, ldb = k + 1, ldc = n + 2;
        const auto a = random_vector(m * lda, rng), b = random_vector(n * ldb, rng);
        std::vector<double> c0(m * ldc, 0.0), c1(m * ldc, 0.0);
        simd::scalar_kernels().gemm_nt(m, n, k, a.data(), lda, b.data(), ldb, c0.data(), ldc);
        avx->gemm_nt(m, n, k, a.data(), lda, b.data(), ldb, c1.data(), ldc);
        double worst = 0.0;
        for (std::size_t i = 0; i < c0.size(); ++i) worst = std::max(worst, std::abs(c0[i] - c1[i]));
        CHECK(worst <= 1e-13 * double(k));

        const auto bn = random_vector(k * ldc, rng);
        std::fill(c0.begin(), c0.end(), 0.0);
        std::fill(c1.begin(), c1.end(), 0.0);
        simd::scalar_kernels().gemm_nn(m, n, k, a.data(), lda, bn.data(), ldc, c0.data(), ldc);
        avx->gemm_nn(m, n, k, a.data(), lda, bn.data(), ldc, c1.data(), ldc);
        worst = 0.0;
        for (std::size_t i = 0; i < c0.size(); ++i) worst = std::max(worst, std::abs(c0[i] - c1[i]));
        CHECK(worst <= 1e-13 * double(k));
    }

    const std::size_t n = 400;
    const double h = 0.05;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = -15.0 / std::pow(1.0 + std::pow(i * h, 2), 2);
    for (std::size_t lanes : {1u, 3u, 4u}) {
        std::vector<double> ks;
        for (std::size_t l = 0; l < lanes; ++l) ks.push_back(0.3 + 1.7 * double(l));
        const auto batch = make_sweep_batch(h, ks);
        std::vector<std::vector<double>> o0(4, std::vector<double>(4 * n)), o1(4, std::vector<double>(4 * n));
        simd::scalar_kernels().jost_sweep(n, v.data(), batch, {o0[0].data(), o0[1].data(), o0[2].data(), o0[3].data()});
        avx->jost_sweep(n, v.data(), batch, {o1[0].data(), o1[1].data(), o1[2].data(), o1[3].data()});
        double worst = 0.0;
        for (int c = 0; c < 4; ++c)
            for (std::size_t i = 0; i < 4 * n; ++i) worst = std::max(worst, std::abs(o0[c][i] - o1[c][i]));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("Jost solutions agree between dispatched variants") {
    if (!simd::avx2_kernels() || !simd::cpu_has_avx2()) return;
    IsaGuard guard;
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(40.0, 1024);
    simd::select_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
    const auto s = solve_m(p, g, 1.25);
    simd::select_isa(simd::Isa::avx2);
    const auto v = solve_m(p, g, 1.25);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s.m[i] - v.m[i]));
    CHECK(worst <= 1e-12);
    CHECK(simd::to_string(simd::Isa::avx2) == "avx2");
}
