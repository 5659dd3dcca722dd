#include "dftlab/numerics/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace dftlab {

namespace {

// g(t) = exp(-a/t) for t > 0, identically zero otherwise.
Jet flat_exp(const Jet& t, double a) {
    if (t.value() <= 0.0) return Jet{};
    return exp(Jet::constant(-a) / t);
}

}  // namespace

BumpFunction::BumpFunction(double sharpness) : sharpness_(sharpness) {
    if (!(sharpness > 0.0)) throw std::invalid_argument("bump sharpness must be positive");
}

Jet BumpFunction::transition(const Jet& t) const {
    if (t.value() <= 0.0) return Jet{};
    if (t.value() >= 1.0) return Jet::constant(1.0);
    const Jet a = flat_exp(t, sharpness_);
    const Jet b = flat_exp(1.0 - t, sharpness_);
    return a / (a + b);
}

Jet BumpFunction::chi(const Jet& k) const { return transition(2.0 - k); }

Jet BumpFunction::psi(const Jet& k) const { return chi(k) - chi(2.0 * k); }

std::array<double, 4> BumpFunction::derivatives(double k) const {
    const Jet v = psi(Jet::variable(k));
    return {v.derivative(0), v.derivative(1), v.derivative(2), v.derivative(3)};
}

BumpFunction lp_bump() { return BumpFunction(1.0); }

DyadicPartition::DyadicPartition(BumpFunction bump, int j_min, int j_max)
    : bump_(bump), j_min_(j_min), j_max_(j_max) {
    if (j_min > j_max) throw std::invalid_argument("dyadic partition: j_min > j_max");
}

Jet DyadicPartition::block(int j, const Jet& k) const {
    if (j < j_min_ || j > j_max_) return Jet{};
    if (j_min_ == j_max_) return Jet::constant(1.0);
    if (j == j_min_) return bump_.chi(std::ldexp(1.0, -j) * k);
    if (j == j_max_) return 1.0 - bump_.chi(std::ldexp(1.0, 1 - j) * k);
    return bump_.psi(std::ldexp(1.0, -j) * k);
}

}  // namespace dftlab
