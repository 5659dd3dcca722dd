#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace dftlab {

enum class Grading { uniform, graded_at_zero };

std::string to_string(Grading g);
Grading grading_from_string(const std::string& s);

/// Nodes on [0, r_max] with two quadrature rules.
///
/// `weights` is the composite rule built from local cubic interpolation on
/// every interval (exact for cubics on any node distribution). `trapezoid`
/// is the plain trapezoid rule; on a uniform grid it is spectrally accurate
/// for integrands that are even about r = 0 and flat at r_max, which is the
/// case for every Dirichlet transform integrand (odd eigenfunction times odd
/// input), so the transforms use it there.
struct RadialGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> trapezoid;
    double r_max = 0.0;
    double mesh = 0.0;  // max node spacing
    Grading grading = Grading::uniform;

    std::size_t size() const { return nodes.size(); }
    bool is_uniform() const { return grading == Grading::uniform; }
    /// Spacing of a uniform grid.
    double spacing() const { return r_max / static_cast<double>(nodes.size() - 1); }
    /// Rule used by transforms and L2 inner products.
    std::span<const double> transform_weights() const {
        return is_uniform() ? std::span<const double>(trapezoid) : std::span<const double>(weights);
    }
    nlohmann::json descriptor() const;
};

RadialGrid build_radial_grid(double r_max, std::size_t n, Grading grading = Grading::uniform);

/// Wavenumber nodes on [0, k_hi] from equal-width 8-point Gauss-Legendre
/// panels. k_lo = 2^(j_min-1) and k_hi = 2^(j_max+1) bound the dyadic block
/// window; the grid itself starts at 0 because the cumulative low block
/// chi(2^-j_min k) extends down to k = 0.
struct SpectralGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    int j_min = 0;
    int j_max = 0;
    double k_lo = 0.0;
    double k_hi = 0.0;
    double panel_width = 0.0;
    double max_spacing = 0.0;

    std::size_t size() const { return nodes.size(); }
    nlohmann::json descriptor() const;
};

inline constexpr std::size_t kSpectralPanelOrder = 8;

/// `refine` > 1 divides the panel width further (used by mesh studies).
SpectralGrid build_spectral_grid(int j_min, int j_max, double r_max, int refine = 1);

}  // namespace dftlab
