#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/lp/lp_analysis.hpp"
#include "dftlab/spectral/spectral.hpp"

using namespace dftlab;

TEST_CASE("weighted Lp norms") {
    const RadialGrid g = build_radial_grid(30.0, 3001);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i] / 2.0);
    // int r^a e^{-p r^2 / 2} dr = Gamma((a+1)/2) / (2 (p/2)^((a+1)/2))
    auto moment = [](double a, double p) { return std::tgamma((a + 1) / 2) / (2 * std::pow(p / 2, (a + 1) / 2)); };
    CHECK(lp_norm(f, 3.0, g) == doctest::Approx(std::pow(moment(3.0, 3.0), 1.0 / 3.0)).epsilon(1e-9));
    CHECK(lp_norm(f, 2.0, g, 1.0) == doctest::Approx(std::sqrt(moment(4.0, 2.0))).epsilon(1e-9));
    CHECK(lp_norm(f, 4.0, g, -0.5) == doctest::Approx(std::pow(moment(2.0, 4.0), 0.25)).epsilon(1e-9));
    CHECK(lp_norm_3d(f, 2.0, g) == doctest::Approx(std::sqrt(4 * std::numbers::pi * moment(4.0, 2.0))).epsilon(1e-9));
    // negative weight exponent: the r = 0 node is skipped, not 0 * inf
    std::vector<double> e(g.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-g.nodes[i]);
    CHECK(std::isfinite(lp_norm(e, 4.0, g, -0.5)));
    CHECK_THROWS(lp_norm(f, 1.0, g));
}

TEST_CASE("A_p brackets in closed form") {
    // w = 1: bracket is 1
    CHECK(ap_ratio(0.0, 2.0, 0.0, 3.0).value == doctest::Approx(1.0));
    // [0,b], s = 1/2, p = 2: avg r^{1/2} avg r^{-1/2} = (2/3)(2) = 4/3
    CHECK(ap_ratio(0.5, 2.0, 0.0, 7.0).value == doctest::Approx(4.0 / 3.0));
    // dilation invariance on [0, b]
    CHECK(ap_ratio(-0.25, 2.25, 0.0, 0.01).value == doctest::Approx(ap_ratio(-0.25, 2.25, 0.0, 100.0).value));
    CHECK(ap_ratio(-1.0, 2.0, 0.0, 1.0).divergent);
    CHECK(ap_ratio(-1.0, 2.0, 0.0, 1.0).logarithmic);
    CHECK_FALSE(ap_ratio(-1.0, 2.0, 1.0, 2.0).divergent);

    CHECK(ap_scan(2.25).classification() == "bounded");
    CHECK(ap_scan(3.0).classification() == "divergent");
    CHECK(ap_scan(1.5).classification() == "divergent");
    CHECK(ap_scan(1.4).divergent);
    CHECK(ap_scan(2.0).sup == doctest::Approx(1.0));
    CHECK(ap_family().size() == 9 + 15);
}

TEST_CASE("test family is seeded and projected") {
    const auto p = aubin_potential(1.0);
    const RadialGrid g = build_radial_grid(64.0, 1024);
    const auto bs = find_bound_states(p, g);
    const auto a = build_test_family(g, 3, &bs), b = build_test_family(g, 3, &bs), c = build_test_family(g, 4, &bs);
    CHECK(a.ids == b.ids);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    const auto w = g.transform_weights();
    for (std::size_t m = 0; m < a.size(); ++m)
        CHECK(std::abs(inner_product(a.member(m), bs.states[0].u, w)) < 1e-12 * std::max(1.0, l2_norm(a.member(m), w)));
}

TEST_CASE("operator-norm estimates and duality members") {
    const RadialGrid g = build_radial_grid(40.0, 801);
    const auto fam = build_test_family(g, 1);
    const BatchOperator twice = [](std::span<const double> x, std::size_t) {
        std::vector<double> y(x.begin(), x.end());
        for (auto& v : y) v *= -2.0;
        return y;
    };
    const auto e = estimate_opnorm(twice, 1.7, 0.3, fam, g);
    CHECK(e.bound == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.members == fam.size());

    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = g.nodes[i] * std::exp(-g.nodes[i]) * std::cos(g.nodes[i]);
    const double q = 3.0;
    const auto gq = duality_member(u, q, g);
    const auto w = g.transform_weights();
    CHECK(inner_product(gq, u, w) == doctest::Approx(std::pow(lp_norm(u, q, g, 2.0 / q - 1.0), q)).epsilon(1e-10));
}

TEST_CASE("square function of the free Laplacian") {
    const RadialGrid g = build_radial_grid(60.0, 1024);
    const Eigenbasis eb = build_eigenbasis(free_potential(), g, build_spectral_grid(-6, 4, 60.0));
    const DyadicPartition part(lp_bump(), -6, 4);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i] / 4.0);
    const auto sq = square_function(eb, BoundStateSet{}, part, f);
    CHECK(sq.j.size() == 11);
    // blocks sum back to f, and sum psi^2 lies in [1/2, 1]
    std::vector<double> s(g.size(), 0.0);
    for (std::size_t b = 0; b < sq.j.size(); ++b)
        for (std::size_t i = 0; i < g.size(); ++i) s[i] += sq.block(b)[i];
    const auto w = g.transform_weights();
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err += w[i] * std::pow(s[i] - f[i], 2);
    CHECK(std::sqrt(err) / l2_norm(f, w) < 1e-8);
    const double ratio = l2_norm(sq.sf, w) / l2_norm(f, w);
    CHECK(ratio >= 1.0 / std::sqrt(2.0));
    CHECK(ratio <= 1.0);
    CHECK_THROWS(square_function(eb, BoundStateSet{}, DyadicPartition(lp_bump(), -8, 4), f));
}

TEST_CASE("random signs") {
    const auto s = random_signs(11, 5);
    CHECK(s == random_signs(11, 5));
    for (int x : s) CHECK((x == 1 || x == -1));
}

TEST_CASE("small window experiment separates the trend") {
    WindowOptions wo;
    wo.levels = {12.5, 25.0};
    wo.density = 2048.0 / 50.0;
    wo.ps = {2.0};
    wo.patterns = 2;
    const auto ex = lp_window_experiment(free_potential(), wo);
    REQUIRE(ex.find(2.0) != nullptr);
    // p = 2: every multiplier with |mu| <= 1 is a contraction
    CHECK(ex.find(2.0)->growth == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(ex.find(2.0)->classification == "stable");
    CHECK(ex.rows.size() == 2);  // one row per (p, level): the worst pattern
}
