#pragma once

#include <span>
#include <vector>

namespace dftlab {

/// First or second derivative of grid samples.
///
/// Three-point centred stencils in the interior (exact on quadratics for
/// order 1, second-order accurate for order 2) and one-sided stencils at the
/// endpoints with the same order of accuracy. Works on non-uniform nodes.
std::vector<double> finite_difference(std::span<const double> values, std::span<const double> nodes,
                                      int order);

}  // namespace dftlab
