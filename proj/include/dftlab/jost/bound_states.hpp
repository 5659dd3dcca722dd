#pragma once

#include <vector>

#include <json.hpp>

#include "dftlab/numerics/grid.hpp"
#include "dftlab/potentials/potential.hpp"

namespace dftlab {

struct BoundState {
    double energy = 0.0;
    std::vector<double> u;  // real, normalised in L2(0, r_max), u(0) = u(r_max) = 0
};

struct BoundStateSet {
    std::vector<BoundState> states;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    nlohmann::json summary() const;
};

/// Number of Dirichlet eigenvalues below E on [0, r_max]: sign changes of the
/// solution with u(0) = 0 (Numerov on uniform grids, three-point otherwise).
std::size_t count_states_below(const std::vector<double>& v, const RadialGrid& grid, double energy);

/// Negative eigenvalues in [-2 sup|V|, -1e-6] by node counting on 64 initial
/// subdivisions and bisection; eigenfunctions by two-sided shooting matched
/// at the outer turning point, then orthonormalised with the transform weights.
BoundStateSet find_bound_states(const PotentialModel& p, const RadialGrid& grid);

}  // namespace dftlab
