#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

#include "dftlab/numerics/bump.hpp"
#include "dftlab/numerics/finite_difference.hpp"
#include "dftlab/numerics/fit.hpp"
#include "dftlab/numerics/grid.hpp"
#include "dftlab/numerics/jet.hpp"
#include "dftlab/numerics/parallel.hpp"
#include "dftlab/numerics/quadrature.hpp"

using namespace dftlab;

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
    const auto q = gauss_legendre(8);
    double s14 = 0.0, s15 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        s14 += q.weights[i] * std::pow(q.nodes[i], 14);
        s15 += q.weights[i] * std::pow(q.nodes[i], 15);
    }
    CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
    CHECK(std::abs(s15) < 1e-15);

    const auto m = gauss_legendre(12, 0.0, 2.0);
    double e = 0.0;
    for (std::size_t i = 0; i < 12; ++i) e += m.weights[i] * std::exp(m.nodes[i]);
    CHECK(e == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("differentiation weights and Lagrange integrals") {
    const std::vector<double> xs{0.28, 0.29, 0.3, 0.31, 0.32};
    for (int m : {1, 2}) {
        const auto w = differentiation_weights(0.3, xs, m);
        double d = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) d += w[i] * std::sin(xs[i]);
        const double exact = m == 1 ? std::cos(0.3) : -std::sin(0.3);
        CHECK(std::abs(d - exact) < (m == 1 ? 1e-9 : 1e-6));
    }
    const std::vector<double> nodes{0.0, 1.0, 2.0, 3.0};
    const auto li = lagrange_integrals(nodes, 1.0, 2.0);
    CHECK(std::accumulate(li.begin(), li.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    double cube = 0.0;
    for (std::size_t i = 0; i < 4; ++i) cube += li[i] * std::pow(nodes[i], 3);
    CHECK(cube == doctest::Approx(3.75).epsilon(1e-14));
}

TEST_CASE("finite differences on non-uniform nodes") {
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
        const double t = i / 40.0;
        x.push_back(t * t * 3.0);
        y.push_back(2.0 * x.back() * x.back() - x.back() + 1.0);
    }
    const auto d1 = finite_difference(y, x, 1);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(d1[i] == doctest::Approx(4.0 * x[i] - 1.0).epsilon(1e-10));
    const auto d2 = finite_difference(y, x, 2);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) CHECK(d2[i] == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("radial grid quadrature") {
    const RadialGrid g = build_radial_grid(10.0, 101);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == doctest::Approx(10.0));
    CHECK(g.spacing() == doctest::Approx(0.1));
    double cubic = 0.0, gauss = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        cubic += g.weights[i] * std::pow(g.nodes[i], 3);
        gauss += g.trapezoid[i] * std::exp(-g.nodes[i] * g.nodes[i]);
    }
    CHECK(cubic == doctest::Approx(2500.0).epsilon(1e-12));
    // even integrand flat at r_max: the trapezoid rule is spectrally accurate
    CHECK(gauss == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-13));

    const RadialGrid gr = build_radial_grid(10.0, 101, Grading::graded_at_zero);
    CHECK_FALSE(gr.is_uniform());
    for (std::size_t i = 1; i < gr.size(); ++i) CHECK(gr.nodes[i] > gr.nodes[i - 1]);
    double c2 = 0.0;
    for (std::size_t i = 0; i < gr.size(); ++i) c2 += gr.weights[i] * std::pow(gr.nodes[i], 3);
    CHECK(c2 == doctest::Approx(2500.0).epsilon(1e-12));
    CHECK_THROWS(grading_from_string("lumpy"));
}

TEST_CASE("spectral grid covers the dyadic window") {
    const SpectralGrid k = build_spectral_grid(-6, 4, 200.0);
    CHECK(k.k_hi == doctest::Approx(32.0));
    CHECK(k.k_lo == doctest::Approx(std::ldexp(1.0, -7)));
    const double total = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
    CHECK(total == doctest::Approx(32.0).epsilon(1e-13));
    double s = 0.0;
    for (std::size_t q = 0; q < k.size(); ++q) s += k.weights[q] * std::cos(3.0 * k.nodes[q]);
    CHECK(s == doctest::Approx(std::sin(96.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("jet derivatives of a composition") {
    const double x = 0.7;
    const Jet f = exp(sin(Jet::variable(x)));
    const double s = std::sin(x), c = std::cos(x), e = std::exp(s);
    CHECK(f.value() == doctest::Approx(e).epsilon(1e-15));
    CHECK(f.derivative(1) == doctest::Approx(c * e).epsilon(1e-14));
    CHECK(f.derivative(2) == doctest::Approx((c * c - s) * e).epsilon(1e-14));
    CHECK(f.derivative(3) == doctest::Approx((c * c * c - 3.0 * s * c - c) * e).epsilon(1e-13));
    const Jet q = Jet::constant(1.0) / (1.0 + Jet::variable(x) * Jet::variable(x));
    CHECK(q.derivative(1) == doctest::Approx(-2.0 * x / std::pow(1 + x * x, 2)).epsilon(1e-14));
}

TEST_CASE("Littlewood-Paley bump and partition") {
    const BumpFunction b = lp_bump();
    CHECK(b(0.49) == 0.0);
    CHECK(b(2.01) == 0.0);
    CHECK(b(1.0) > 0.0);
    for (double k : {0.013, 0.3, 1.0, 1.7, 5.5, 19.0}) {
        double s = 0.0;
        for (int j = -12; j <= 8; ++j) s += b(std::ldexp(k, -j));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    const DyadicPartition part(b, -6, 4);
    for (double k : {0.0, 0.004, 0.2, 3.0, 31.9}) {
        double s = 0.0;
        for (int j = -6; j <= 4; ++j) s += part.block(j, k);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    // jet derivatives against central differences
    const double k = 1.3, h = 1e-4;
    const auto d = b.derivatives(k);
    CHECK(d[1] == doctest::Approx((b(k + h) - b(k - h)) / (2 * h)).epsilon(1e-7));
    CHECK(d[2] == doctest::Approx((b(k + h) - 2 * b(k) + b(k - h)) / (h * h)).epsilon(1e-5));
}

TEST_CASE("line fits and envelopes") {
    const std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> y;
    for (double t : x) y.push_back(3.0 / (t * t));
    const auto f = loglog_fit(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(f.points == 5);
    const auto l = fit_line(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5});
    CHECK(l.slope == doctest::Approx(2.0));
    CHECK(l.intercept == doctest::Approx(1.0));

    std::vector<double> xs, ys;
    for (int i = 1; i < 20000; ++i) {
        xs.push_back(i * 0.005);
        ys.push_back(std::cos(7.0 * xs.back()) / xs.back());
    }
    const auto env = log_binned_envelope(xs, ys, 1.0, 100.0, 10);
    CHECK(loglog_fit(env.x, env.y).slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("worker pool covers every index once") {
    const WorkerPool pool(3);
    std::vector<std::atomic<int>> hits(1000);
    pool.parallel_for(hits.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) hits[i]++;
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
}
