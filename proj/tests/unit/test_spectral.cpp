#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/spectral/spectral.hpp"

using namespace dftlab;

namespace {

std::vector<double> bumps(const RadialGrid& g) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = g.nodes[i];
        f[i] = r * std::exp(-r * r / 2.0) + 0.5 * std::exp(-(r - 12.0) * (r - 12.0));
    }
    return f;
}

}  // namespace

TEST_CASE("free eigenfunctions are sines and the transform is the sine transform") {
    const RadialGrid g = build_radial_grid(40.0, 1024);
    const SpectralGrid kg = build_spectral_grid(-6, 4, 40.0);
    const Eigenbasis eb = build_eigenbasis(free_potential(), g, kg);
    for (std::size_t q = 0; q < eb.nk(); q += 37)
        for (std::size_t i = 0; i < eb.nr(); i += 13)
            CHECK(std::abs(eb.e(q, i) - std::sin(g.nodes[i] * kg.nodes[q])) < 1e-13);
    // F[r e^{-r^2/2}](k) = k e^{-k^2/2}
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i] / 2.0);
    const auto F = forward_transform(eb, BoundStateSet{}, f);
    for (std::size_t q = 0; q < kg.size(); q += 101)
        CHECK(std::abs(F.values[q] - kg.nodes[q] * std::exp(-kg.nodes[q] * kg.nodes[q] / 2.0)) < 1e-12);
}

TEST_CASE("transform round trip, Parseval and bound-state orthogonality") {
    // half strength keeps one bound state but no zero-energy resonance, whose
    // finite-box error only decays like r_max^-3
    const auto p = aubin_potential(1.0).scaled(0.5);
    const RadialGrid g = build_radial_grid(50.0, 2048);
    const SpectralGrid kg = build_spectral_grid(-6, 4, 50.0);
    const Eigenbasis eb = build_eigenbasis(p, g, kg);
    CHECK_FALSE(eb.resonant());
    const auto bs = find_bound_states(p, g);
    const auto w = g.transform_weights();
    const auto f = bumps(g);
    const auto fc = project_continuous(bs, f, w);
    const auto F = forward_transform(eb, bs, f);
    const auto back = inverse_transform(eb, F);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err += w[i] * std::pow(back[i] - fc[i], 2);
    CHECK(std::sqrt(err) / l2_norm(f, w) < 1e-6);

    double energy = F.continuous_energy(kg.weights);
    for (double c : F.bound_components) energy += c * c;
    CHECK(energy == doctest::Approx(inner_product(f, f, w)).epsilon(1e-6));

    const auto Fb = forward_transform(eb, bs, bs.states[0].u);
    CHECK(Fb.continuous_energy(kg.weights) < 1e-6);
    CHECK(std::abs(Fb.bound_components[0] - 1.0) < 1e-10);

    for (std::size_t q = 0; q < kg.size(); q += 97) {
        CHECK(std::abs(std::abs(eb.omega(q)) - 1.0) < 1e-14);
        CHECK(std::abs(F.values[q] - eb.omega(q) * F.real_values[q]) < 1e-14);
    }
    const auto zero = forward_transform(eb, bs, std::vector<double>(g.size(), 0.0));
    CHECK(zero.continuous_energy(kg.weights) == 0.0);
}

TEST_CASE("batched transforms match single ones") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(30.0, 512);
    const Eigenbasis eb = build_eigenbasis(p, g, build_spectral_grid(-4, 3, 30.0));
    const auto f = bumps(g);
    std::vector<double> two(f);
    for (double x : f) two.push_back(-2.0 * x);
    const auto y = forward_real(eb, two, 2);
    const auto y1 = forward_real(eb, f, 1);
    for (std::size_t q = 0; q < eb.nk(); ++q) {
        CHECK(y[q] == doctest::Approx(y1[q]).epsilon(1e-12));
        CHECK(y[eb.nk() + q] == doctest::Approx(-2.0 * y1[q]).epsilon(1e-12));
    }
    const WorkerPool pool(2);
    const auto yp = forward_real(eb, two, 2, &pool);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(yp[i] == doctest::Approx(y[i]).epsilon(1e-13));
}

TEST_CASE("radial lift and lower") {
    const RadialGrid g = build_radial_grid(10.0, 201);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-g.nodes[i]) * (1.0 + g.nodes[i]);
    const auto ft = lift_radial(f, g.nodes);
    CHECK(ft[0] == 0.0);
    CHECK(ft[10] == doctest::Approx(std::sqrt(4 * std::numbers::pi) * g.nodes[10] * f[10]));
    const auto back = lower_radial(ft, g.nodes);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-14));
    CHECK(back[0] == doctest::Approx(f[0]).epsilon(3e-3));  // linear extrapolation, O(h^2)
}

TEST_CASE("resonant round trip improves with the box size") {
    const auto p = aubin_potential(1.0);
    double prev = 1.0;
    for (double R : {25.0, 50.0}) {
        const RadialGrid g = build_radial_grid(R, std::size_t(R * 41));
        const Eigenbasis eb = build_eigenbasis(p, g, build_spectral_grid(-6, 4, R));
        const auto bs = find_bound_states(p, g);
        const auto w = g.transform_weights();
        const auto f = bumps(g);
        const auto fc = project_continuous(bs, f, w);
        const auto back = inverse_transform(eb, forward_transform(eb, bs, f));
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) err += w[i] * std::pow(back[i] - fc[i], 2);
        err = std::sqrt(err) / l2_norm(f, w);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}
