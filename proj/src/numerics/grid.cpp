#include "dftlab/numerics/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dftlab/numerics/quadrature.hpp"

namespace dftlab {

namespace {

constexpr double kGradingRatio = 1.05;
// Smallest spacing of a graded grid relative to its bulk spacing.
constexpr double kGradingDepth = 50.0;

std::vector<double> cubic_composite_weights(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Stencil {i-1, i, i+1, i+2}, shifted inside at the ends.
        std::size_t s = (i == 0) ? 0 : i - 1;
        if (s + 4 > n) s = n - 4;
        const std::span<const double> xs(x.data() + s, 4);
        const auto li = lagrange_integrals(xs, x[i], x[i + 1]);
        for (std::size_t j = 0; j < 4; ++j) w[s + j] += li[j];
    }
    return w;
}

}  // namespace

std::string to_string(Grading g) { return g == Grading::uniform ? "uniform" : "graded-at-zero"; }

Grading grading_from_string(const std::string& s) {
    if (s == "uniform") return Grading::uniform;
    if (s == "graded-at-zero" || s == "graded") return Grading::graded_at_zero;
    throw std::invalid_argument("unknown grading '" + s + "' (expected uniform or graded-at-zero)");
}

nlohmann::json RadialGrid::descriptor() const {
    return {{"r_max", r_max}, {"n", nodes.size()}, {"grading", to_string(grading)}};
}

RadialGrid build_radial_grid(double r_max, std::size_t n, Grading grading) {
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw std::invalid_argument("radial grid: r_max must be positive and finite");
    if (n < 16)
        throw std::invalid_argument("radial grid: n = " + std::to_string(n) +
                                    " is too small; need at least 16 nodes");
    RadialGrid g;
    g.r_max = r_max;
    g.grading = grading;
    g.nodes.resize(n);
    if (grading == Grading::uniform) {
        const double h = r_max / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) g.nodes[i] = h * static_cast<double>(i);
    } else {
        const auto steps = static_cast<std::size_t>(
            std::ceil(std::log(kGradingDepth) / std::log(kGradingRatio)));
        const std::size_t geo = std::min(steps, (n - 1) / 2);
        double rel = 0.0;  // total length in units of the bulk spacing
        std::vector<double> spacing(n - 1, 1.0);
        for (std::size_t i = 0; i < geo; ++i)
            spacing[i] = std::pow(kGradingRatio, -static_cast<double>(geo - i));
        for (double s : spacing) rel += s;
        const double h = r_max / rel;
        g.nodes[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) g.nodes[i] = g.nodes[i - 1] + h * spacing[i - 1];
    }
    g.nodes.back() = r_max;

    g.mesh = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) g.mesh = std::max(g.mesh, g.nodes[i + 1] - g.nodes[i]);

    g.weights = cubic_composite_weights(g.nodes);
    g.trapezoid.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = 0.5 * (g.nodes[i + 1] - g.nodes[i]);
        g.trapezoid[i] += d;
        g.trapezoid[i + 1] += d;
    }
    return g;
}

nlohmann::json SpectralGrid::descriptor() const { return {{"j_min", j_min}, {"j_max", j_max}}; }

SpectralGrid build_spectral_grid(int j_min, int j_max, double r_max, int refine) {
    if (j_min > j_max)
        throw std::invalid_argument("spectral grid: inverted dyadic range (j_min > j_max)");
    if (!(r_max > 0.0)) throw std::invalid_argument("spectral grid: r_max must be positive");
    if (refine < 1) throw std::invalid_argument("spectral grid: refine must be >= 1");

    SpectralGrid g;
    g.j_min = j_min;
    g.j_max = j_max;
    g.k_lo = std::ldexp(1.0, j_min - 1);
    g.k_hi = std::ldexp(1.0, j_max + 1);

    const QuadratureRule ref = gauss_legendre(kSpectralPanelOrder);
    // Largest node gap of a panel of unit width, including the gap across
    // the shared panel boundary.
    double gap = 1.0 + ref.nodes.front() + 1.0 - ref.nodes.back();
    for (std::size_t i = 0; i + 1 < ref.nodes.size(); ++i)
        gap = std::max(gap, ref.nodes[i + 1] - ref.nodes[i]);
    gap *= 0.5;

    const double target = std::numbers::pi / (4.0 * r_max);
    const auto panels =
        static_cast<std::size_t>(std::ceil(g.k_hi * gap / target)) * static_cast<std::size_t>(refine);
    g.panel_width = g.k_hi / static_cast<double>(panels);
    g.max_spacing = gap * g.panel_width;

    g.nodes.reserve(panels * kSpectralPanelOrder);
    g.weights.reserve(panels * kSpectralPanelOrder);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = g.panel_width * static_cast<double>(p);
        const double mid = a + 0.5 * g.panel_width;
        for (std::size_t i = 0; i < kSpectralPanelOrder; ++i) {
            g.nodes.push_back(mid + 0.5 * g.panel_width * ref.nodes[i]);
            g.weights.push_back(0.5 * g.panel_width * ref.weights[i]);
        }
    }
    return g;
}

}  // namespace dftlab
