#include <doctest.h>

#include <cmath>
#include <complex>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/jost/jost.hpp"
#include "dftlab/potentials/potential.hpp"

using namespace dftlab;
using cd = std::complex<double>;

namespace {

// f'' = (V - k^2) f integrated from r_max down to r with RK4; f = e^{ikr}
// beyond r_max where the truncated potential vanishes.
std::pair<cd, cd> rk4_jost(const PotentialModel& p, double r_max, double k, double r_end, double h) {
    cd f = std::exp(cd(0, k * r_max)), d = cd(0, k) * f;
    const int steps = int(std::lround((r_max - r_end) / h));
    h = (r_max - r_end) / steps;
    double r = r_max;
    auto acc = [&](double x, cd y) { return (p(x) - k * k) * y; };
    for (int s = 0; s < steps; ++s) {
        const cd k1f = d, k1d = acc(r, f);
        const cd k2f = d - 0.5 * h * k1d, k2d = acc(r - h / 2, f - 0.5 * h * k1f);
        const cd k3f = d - 0.5 * h * k2d, k3d = acc(r - h / 2, f - 0.5 * h * k2f);
        const cd k4f = d - h * k3d, k4d = acc(r - h, f - h * k3f);
        f -= h / 6 * (k1f + 2. * k2f + 2. * k3f + k4f);
        d -= h / 6 * (k1d + 2. * k2d + 2. * k3d + k4d);
        r -= h;
    }
    return {f, d};
}

}  // namespace

TEST_CASE("free Jost solution is e^{ikr}") {
    const RadialGrid g = build_radial_grid(30.0, 512);
    const auto c = solve_m(free_potential(), g, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(c.m[i] - 1.0) < 1e-14);
        CHECK(std::abs(c.dm_dr[i]) < 1e-14);
    }
}

TEST_CASE("Jost solution against an RK4 oracle") {
    const auto p = aubin_potential(1.0);
    const double R = 30.0;
    const RadialGrid g = build_radial_grid(R, 4096);
    for (double k : {0.05, 0.7, 3.0}) {
        const auto c = solve_m(p, g, k);
        const auto [f0, d0] = rk4_jost(p, R, k, 0.0, 1e-4);
        CHECK(std::abs(c.m[0] - f0) < 1e-6 * std::max(1.0, std::abs(f0)));
        // f'(0) = m'(0) + ik m(0)
        CHECK(std::abs(c.dm_dr[0] + cd(0, k) * c.m[0] - d0) < 1e-5 * std::max(1.0, std::abs(d0)));
        const std::size_t i = 512;  // r = 3.75
        const auto [fr, dr] = rk4_jost(p, R, k, g.nodes[i], 1e-4);
        CHECK(std::abs(std::exp(cd(0, k * g.nodes[i])) * c.m[i] - fr) < 1e-6);
    }
}

TEST_CASE("dm/dk against a difference quotient") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(30.0, 2048);
    const double k = 0.9, h = 1e-5;
    const auto d = solve_dm_dk(p, g, k);
    const auto a = solve_m(p, g, k + h), b = solve_m(p, g, k - h);
    for (std::size_t i : {0u, 100u, 1000u}) CHECK(std::abs(d.dm_dk[i] - (a.m[i] - b.m[i]) / (2 * h)) < 1e-6);
}

TEST_CASE("scattering data, Wronskian and determinant") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(50.0, 2048);
    const std::vector<double> ks{0.01, 0.1, 1.0, 4.0, 16.0};
    const auto sc = scattering_at_origin(p, g, ks);
    CHECK(sc.max_wronskian_defect() < 1e-4);
    for (double k : {0.1, 1.0, 4.0}) CHECK(determinant_identity(p, g, k).relative_error < 1e-8);
    const auto fr = scattering_at_origin(free_potential(), g, ks);
    for (const auto& f : fr.f0) CHECK(std::abs(f - 1.0) < 1e-14);
    CHECK(fr.max_wronskian_defect() < 1e-14);
}

TEST_CASE("zero-energy resonance of the Aubin linearisation") {
    // V = -5 phi^4 has the zero-energy solution r d phi / d a; f(0,0) -> 0 as r_max grows
    double prev = 1.0;
    for (double R : {25.0, 50.0, 100.0}) {
        const RadialGrid g = build_radial_grid(R, std::size_t(R * 40));
        const auto rr = detect_resonance(aubin_potential(1.0), g);
        CHECK(rr.magnitude < prev);
        prev = rr.magnitude;
    }
    CHECK(prev < 1e-3);
    const RadialGrid g = build_radial_grid(100.0, 4000);
    CHECK(detect_resonance(aubin_potential(1.0), g).resonant);
    CHECK_FALSE(detect_resonance(aubin_potential(1.0).scaled(0.5), g).resonant);
    CHECK(detect_resonance(free_potential(), g).magnitude == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bound states solve the Dirichlet problem") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(50.0, 4096);
    const auto bs = find_bound_states(p, g);
    REQUIRE(bs.size() == 1);
    const auto& s = bs.states[0];
    CHECK(s.energy < 0.0);
    CHECK(count_states_below(p.sample(g.nodes), g, s.energy - 1e-6) == 0);
    CHECK(count_states_below(p.sample(g.nodes), g, s.energy + 1e-6) == 1);
    // residual of -u'' + V u - E u in the interior
    const double h = g.spacing();
    double res = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        if (i < 2 || i + 2 >= g.size()) continue;
        const double d2 = (-s.u[i + 2] + 16 * s.u[i + 1] - 30 * s.u[i] + 16 * s.u[i - 1] - s.u[i - 2]) / (12 * h * h);
        res = std::max(res, std::abs(-d2 + (p(g.nodes[i]) - s.energy) * s.u[i]));
        scale = std::max(scale, std::abs(s.u[i]));
    }
    CHECK(res / scale < 1e-4);
    double n2 = 0.0;
    const auto w = g.transform_weights();
    for (std::size_t i = 0; i < g.size(); ++i) n2 += w[i] * s.u[i] * s.u[i];
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(find_bound_states(free_potential(), g).empty());
}
