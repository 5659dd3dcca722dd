#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/multiplier/multiplier.hpp"
#include "dftlab/spectral/spectral.hpp"

using namespace dftlab;

TEST_CASE("Mikhlin constants are dilation invariant") {
    const BumpFunction b = lp_bump();
    const Multiplier hp = high_pass(b);
    const Multiplier dil("high_pass(8k)", Support::full, [hp](const Jet& k) { return hp(8.0 * k); });
    const auto ks = mikhlin_samples(-10, 10);
    const auto a = check_mikhlin(hp, ks), c = check_mikhlin(dil, ks);
    for (int l = 0; l < 4; ++l) CHECK(std::abs(a.constants[l] - c.constants[l]) <= 1e-10 * a.constants[l]);
    CHECK(a.constants[0] == doctest::Approx(1.0));
    CHECK(a.pass);
    CHECK_FALSE(check_mikhlin(hp, ks, 0.5).pass);

    const auto one = check_mikhlin(constant_multiplier(1.0), ks);
    CHECK(one.constants[0] == 1.0);
    CHECK(one.constants[1] == 0.0);
    // sin(log k): k^l d^l/dk^l stays bounded on every octave
    const auto sl = check_mikhlin(sin_log(), ks);
    CHECK(sl.constants[1] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::isfinite(sl.constants[3]));
}

TEST_CASE("multiplier factories and supports") {
    const BumpFunction b = lp_bump();
    const auto ks = mikhlin_samples(-10, 8, 64);
    CHECK(verify_support(high_pass(b), ks));
    CHECK(verify_support(low_pass(b), ks));
    CHECK(high_pass(b)(0.5) == 0.0);
    CHECK(low_pass(b)(1.5) == 0.0);
    for (double k : {0.3, 0.7, 1.1})
        CHECK(high_pass(b)(k) + low_pass(b)(k) + b(k) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_block(b, 2)(4.0) == doctest::Approx(b(1.0)));
    const DyadicPartition part(b, -3, 2);
    const std::vector<int> signs{1, 1, 1, 1, 1, 1};
    for (double k : {0.01, 0.5, 3.3}) CHECK(random_sign_lp(part, signs)(k) == doctest::Approx(1.0));
    CHECK_THROWS(random_sign_lp(part, std::vector<int>{1, -1}));
    CHECK(product(high_pass(b), sin_log())(5.0) == doctest::Approx(high_pass(b)(5.0) * std::sin(std::log(5.0))));
    CHECK(to_string(Support::low) == "low");
}

TEST_CASE("kernel matvec agrees with the spectral multiplier") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(40.0, 512);
    const Eigenbasis eb = build_eigenbasis(p, g, build_spectral_grid(-6, 3, 40.0));
    const auto bs = find_bound_states(p, g);
    const auto w = g.transform_weights();
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-std::pow(g.nodes[i] - 3.0, 2));
    const auto fc = project_continuous(bs, f, w);
    const Multiplier mu = high_pass(lp_bump());
    const auto Mf = apply_multiplier(eb, bs, mu, f);

    std::vector<std::size_t> rows{5, 40, 100, 300}, cols(g.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    const Matrix K = assemble_kernel(eb, mu, rows, cols);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols.size(); ++j) s += K(a, j) * w[j] * fc[j];
        CHECK(s == doctest::Approx(Mf[rows[a]]).epsilon(1e-10));
    }
    std::vector<std::size_t> big(std::size_t(1) << 14, 0);
    CHECK_THROWS_AS(assemble_kernel(eb, mu, big, big), std::length_error);
}

TEST_CASE("constant multiplier is the continuous projection") {
    // half strength: one bound state and no zero-energy resonance
    const auto p = aubin_potential(1.0).scaled(0.5);
    const RadialGrid g = build_radial_grid(40.0, 1024);
    const Eigenbasis eb = build_eigenbasis(p, g, build_spectral_grid(-6, 4, 40.0));
    const auto bs = find_bound_states(p, g);
    const auto w = g.transform_weights();
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i] / 3.0);
    const auto fc = project_continuous(bs, f, w);
    const auto m = apply_multiplier(eb, bs, constant_multiplier(1.0), f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err += w[i] * std::pow(m[i] - fc[i], 2);
    CHECK(std::sqrt(err) / l2_norm(fc, w) < 1e-6);
}

TEST_CASE("free low-energy kernel has no K2") {
    const RadialGrid g = build_radial_grid(60.0, 1024);
    EigenbasisOptions eo;
    eo.probe_indices = kernel_indices(g, 40.0, 8);
    const Eigenbasis eb = build_eigenbasis(free_potential(), g, build_spectral_grid(-6, 4, 60.0), eo);
    const auto d = decompose_kernel(eb, low_pass(lp_bump()));
    const auto s = d.summary();
    CHECK(s["piece_sum_relative_error"].get<double>() < 1e-13);
    CHECK(d.K2.max_abs() < 1e-13 * d.K.max_abs());
    CHECK(d.K3.max_abs() > 0.0);
    // V = 0: K(r,r') = (1/pi) int mu (cos((r-r')k) - cos((r+r')k)) dk, K1 the first half
    const auto& kg = eb.kgrid();
    const Multiplier mu = low_pass(lp_bump());
    for (std::size_t a : {3u, 17u}) {
        double k1 = 0.0, k = 0.0;
        for (std::size_t q = 0; q < kg.size(); ++q) {
            const double m = kg.weights[q] * mu(kg.nodes[q]);
            k1 += m * std::cos((d.r[a] - d.r[5]) * kg.nodes[q]) / std::numbers::pi;
            k += m * (std::cos((d.r[a] - d.r[5]) * kg.nodes[q]) - std::cos((d.r[a] + d.r[5]) * kg.nodes[q])) /
                 std::numbers::pi;
        }
        CHECK(d.K1(a, 5) == doctest::Approx(k1).epsilon(1e-12));
        CHECK(d.K(a, 5) == doctest::Approx(k).epsilon(1e-12));
    }
    CHECK_THROWS(decompose_kernel(eb, constant_multiplier(1.0)));
}

TEST_CASE("high-energy K3 decays along the diagonal") {
    // V = 0: K3(r,r) = -(1/pi) int mu cos(2rk) dk
    {
        const RadialGrid g = build_radial_grid(100.0, 1024);
        EigenbasisOptions eo;
        eo.probe_indices = kernel_indices(g, 60.0, 8);
        const Eigenbasis eb = build_eigenbasis(free_potential(), g, build_spectral_grid(-6, 4, 100.0), eo);
        const Multiplier mu = high_pass(lp_bump());
        const auto d = decompose_kernel(eb, mu);
        const auto& kg = eb.kgrid();
        for (std::size_t a : {2u, 9u, 30u}) {
            double s = 0.0;
            for (std::size_t q = 0; q < kg.size(); ++q) s -= kg.weights[q] * mu(kg.nodes[q]) * std::cos(2 * d.r[a] * kg.nodes[q]);
            CHECK(d.K3(a, a) == doctest::Approx(s / std::numbers::pi).epsilon(1e-11));
        }
    }
    const RadialGrid g = build_radial_grid(100.0, 2048);
    EigenbasisOptions eo;
    eo.probe_indices = kernel_indices(g, 80.0, 4);
    const Eigenbasis eb = build_eigenbasis(aubin_potential(1.0), g, build_spectral_grid(-6, 4, 100.0), eo);
    const auto rep = verify_high_energy_bounds(decompose_kernel(eb, high_pass(lp_bump())));
    CHECK(rep.k3_diagonal.slope == doctest::Approx(-1.0).epsilon(0.2));
    CHECK(std::isfinite(rep.c2));
}

TEST_CASE("Hormander pairs") {
    const auto pairs = hormander_pairs(40, 1.0, 100.0, 0.5);
    CHECK(pairs.size() == 40);
    for (auto [a, b] : pairs) {
        CHECK(a >= 1.0);
        CHECK(b <= 100.0);
        CHECK(std::abs(a - b) >= 0.5);
    }
    CHECK(hormander_pairs(40, 1.0, 100.0, 0.5) == pairs);
}
