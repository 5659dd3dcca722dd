#include "dftlab/numerics/finite_difference.hpp"

#include <stdexcept>

#include "dftlab/numerics/quadrature.hpp"

namespace dftlab {

std::vector<double> finite_difference(std::span<const double> values, std::span<const double> nodes,
                                      int order) {
    const std::size_t n = nodes.size();
    if (values.size() != n) throw std::invalid_argument("finite_difference: size mismatch");
    if (n < 5) throw std::invalid_argument("finite_difference: need at least 5 nodes");
    if (order != 1 && order != 2) throw std::invalid_argument("finite_difference: order must be 1 or 2");

    std::vector<double> out(n);
    auto apply = [&](std::size_t at, std::size_t first, std::size_t count) {
        const auto w = differentiation_weights(nodes[at], nodes.subspan(first, count), order);
        double s = 0.0;
        for (std::size_t j = 0; j < count; ++j) s += w[j] * values[first + j];
        out[at] = s;
    };
    // One-sided end stencils need one extra point for the second derivative.
    const std::size_t edge = order == 1 ? 3 : 4;
    apply(0, 0, edge);
    for (std::size_t i = 1; i + 1 < n; ++i) apply(i, i - 1, 3);
    apply(n - 1, n - edge, edge);
    return out;
}

}  // namespace dftlab
