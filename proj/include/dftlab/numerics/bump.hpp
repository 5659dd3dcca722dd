#pragma once

#include <array>

#include "dftlab/numerics/jet.hpp"

namespace dftlab {

/// Littlewood-Paley bump psi(k) = chi(k) - chi(2k).
///
/// chi is a C-infinity step equal to 1 on [0,1] and 0 on [2,inf), built from
/// the smoothstep eta(t) = g(t) / (g(t) + g(1-t)), g(t) = exp(-sharpness/t).
/// Hence psi >= 0, supp psi = [1/2, 2] and sum_j psi(2^-j k) telescopes to 1.
class BumpFunction {
public:
    explicit BumpFunction(double sharpness = 1.0);

    double sharpness() const { return sharpness_; }

    Jet transition(const Jet& t) const;
    Jet chi(const Jet& k) const;
    Jet psi(const Jet& k) const;

    double operator()(double k) const { return psi(Jet::constant(k)).value(); }

    /// psi and its first three derivatives at k.
    std::array<double, 4> derivatives(double k) const;

private:
    double sharpness_;
};

BumpFunction lp_bump();

/// Finite dyadic partition on the window [0, 2^(j_max+1)].
///
/// Interior blocks are psi(2^-j k). The lowest block is the cumulative tail
/// chi(2^-j_min k) = sum_{j<=j_min} psi(2^-j k) and the top block is
/// 1 - chi(2^(1-j_max) k) = sum_{j>=j_max} psi(2^-j k), so the blocks sum to
/// exactly 1 on the window.
class DyadicPartition {
public:
    DyadicPartition(BumpFunction bump, int j_min, int j_max);

    int j_min() const { return j_min_; }
    int j_max() const { return j_max_; }
    const BumpFunction& bump() const { return bump_; }

    Jet block(int j, const Jet& k) const;
    double block(int j, double k) const { return block(j, Jet::constant(k)).value(); }

private:
    BumpFunction bump_;
    int j_min_;
    int j_max_;
};

}  // namespace dftlab
