#include "dftlab/numerics/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dftlab {

QuadratureRule gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        q.nodes[i] = -z;
        q.nodes[n - 1 - i] = z;
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    QuadratureRule q = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < n; ++i) {
        q.nodes[i] = mid + half * q.nodes[i];
        q.weights[i] *= half;
    }
    return q;
}

std::vector<double> differentiation_weights(double x0, std::span<const double> xs, int m) {
    const std::size_t n = xs.size();
    if (n == 0 || m < 0 || static_cast<std::size_t>(m) >= n)
        throw std::invalid_argument("differentiation_weights: need more points than derivative order");
    // c[j][k]: weight of point j for the k-th derivative.
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
    return w;
}

std::vector<double> lagrange_integrals(std::span<const double> xs, double a, double b) {
    const std::size_t n = xs.size();
    // Degree n-1 integrand: ceil(n/2) Gauss points are exact; take one extra.
    const QuadratureRule q = gauss_legendre(n / 2 + 1, a, b);
    std::vector<double> w(n, 0.0);
    for (std::size_t g = 0; g < q.nodes.size(); ++g) {
        const double x = q.nodes[g];
        for (std::size_t j = 0; j < n; ++j) {
            double l = 1.0;
            for (std::size_t i = 0; i < n; ++i)
                if (i != j) l *= (x - xs[i]) / (xs[j] - xs[i]);
            w[j] += q.weights[g] * l;
        }
    }
    return w;
}

}  // namespace dftlab
