#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dftlab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Weights w_j such that sum_j w_j f(x_j) approximates f^(m)(x0), from the
/// interpolating polynomial through the given points (Fornberg's recursion).
std::vector<double> differentiation_weights(double x0, std::span<const double> xs, int m);

/// Integrals over [a, b] of the Lagrange basis polynomials on nodes xs.
std::vector<double> lagrange_integrals(std::span<const double> xs, double a, double b);

}  // namespace dftlab
