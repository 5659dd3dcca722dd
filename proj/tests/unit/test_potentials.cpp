#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dftlab/numerics/grid.hpp"
#include "dftlab/potentials/potential.hpp"

using namespace dftlab;

TEST_CASE("Aubin potential is -5 phi^4") {
    for (double a : {0.5, 1.0, 3.0}) {
        const auto p = aubin_potential(a);
        for (double r : {0.0, 0.3, 2.0, 17.0}) {
            CHECK(p(r) == doctest::Approx(-5.0 * std::pow(eval_phi(r, a), 4)).epsilon(1e-14));
            const double h = 1e-5;
            CHECK(p.derivative(r + 0.1) == doctest::Approx((p(r + 0.1 + h) - p(r + 0.1 - h)) / (2 * h)).epsilon(1e-6));
        }
        const double h = 1e-6;
        CHECK(eval_dphi_da(1.5, a) ==
              doctest::Approx((eval_phi(1.5, a + h) - eval_phi(1.5, a - h)) / (2 * h)).epsilon(1e-7));
        CHECK(p.beta() == 4.0);
    }
    // phi solves -phi'' - 2 phi'/r = phi^5
    const double a = 1.0, r = 0.8, h = 1e-4;
    const double d1 = (eval_phi(r + h, a) - eval_phi(r - h, a)) / (2 * h);
    const double d2 = (eval_phi(r + h, a) - 2 * eval_phi(r, a) + eval_phi(r - h, a)) / (h * h);
    CHECK(-d2 - 2.0 * d1 / r == doctest::Approx(std::pow(eval_phi(r, a), 5)).epsilon(1e-6));
}

TEST_CASE("tail moment of the Aubin potential") {
    const auto p = aubin_potential(1.0);
    // int_R^inf r 15 (1+r^2)^-2 dr = 7.5 / (1 + R^2)
    CHECK(p.tail_moment(10.0) == doctest::Approx(7.5 / 101.0).epsilon(1e-10));
}

TEST_CASE("free, scaled and re-labelled potentials") {
    const auto f = free_potential();
    CHECK(f.is_zero());
    CHECK(f(3.0) == 0.0);
    const auto p = aubin_potential(1.0).scaled(0.5);
    CHECK(p(0.0) == doctest::Approx(-7.5));
    CHECK(aubin_potential(1.0).with_beta(5.0).beta() == 5.0);
}

TEST_CASE("decay certificate") {
    const RadialGrid g = build_radial_grid(200.0, 4096);
    const auto ok = check_decay(aubin_potential(1.0), g);
    CHECK(ok.pass);
    CHECK(ok.c_v == doctest::Approx(15.0).epsilon(0.05));
    CHECK_FALSE(check_decay(aubin_potential(1.0).with_beta(5.0), g).pass);
}

TEST_CASE("tabulated potential") {
    std::ostringstream s;
    s << "# beta=4\n";
    for (int i = 0; i <= 400; ++i) {
        const double r = i * 0.05;
        s << r << ' ' << -15.0 / std::pow(1.0 + r * r, 2) << '\n';
    }
    std::istringstream in(s.str());
    const auto p = parse_tabulated_potential(in, "aubin-table");
    const auto ref = aubin_potential(1.0);
    for (double r : {1.234, 3.3, 7.77}) {
        CHECK(p(r) == doctest::Approx(ref(r)).epsilon(1e-4));
        CHECK(p.derivative(r) == doctest::Approx(ref.derivative(r)).epsilon(1e-2));
    }
    CHECK(p(25.0) == 0.0);
    CHECK(p.beta() == 4.0);

    std::istringstream bad("# beta=2\n0 1\n1 2\n0.5 3\n");
    CHECK_THROWS(parse_tabulated_potential(bad, "bad"));
    CHECK_THROWS(load_tabulated_potential("/nonexistent/table.txt"));
}
