#include "dftlab/jost/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "dftlab/numerics/quadrature.hpp"

namespace dftlab {

namespace {

double sinc(double a) { return std::abs(a) < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a; }

// (a cos a - sin a) / a^2
double sinc_slope(double a) {
    if (std::abs(a) < 0.05) {
        const double a2 = a * a;
        return a * (-1.0 / 3.0 + a2 * (1.0 / 30.0 - a2 / 840.0));
    }
    return (a * std::cos(a) - std::sin(a)) / (a * a);
}

const QuadratureRule& gl16() {
    static const QuadratureRule rule = gauss_legendre(16);
    return rule;
}

}  // namespace

cplx volterra_h(double a) { return std::polar(1.0, a) * sinc(a); }

cplx volterra_dh(double a) { return std::polar(1.0, a) * cplx(sinc_slope(a), sinc(a)); }

PanelMoments panel_moments(std::span<const double> x, double h, double k, bool with_dk) {
    const int d = static_cast<int>(x.size()) - 1;
    if (d < 1 || d > 3) throw std::invalid_argument("panel_moments: stencil must have 2 to 4 nodes");
    PanelMoments pm;
    pm.degree = d;
    std::array<double, 4> denom{};
    for (int j = 0; j <= d; ++j) {
        denom[j] = 1.0;
        for (int q = 0; q <= d; ++q)
            if (q != j) denom[j] *= x[j] - x[q];
    }
    const auto& rule = gl16();
    const int pieces = std::max(1, static_cast<int>(std::ceil(2.0 * k * h)));
    const double w = h / pieces;
    for (int piece = 0; piece < pieces; ++piece) {
        const double s0 = piece * w;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double s = s0 + 0.5 * w * (rule.nodes[q] + 1.0);
            const double wq = 0.5 * w * rule.weights[q];
            std::array<double, 4> L{};
            for (int j = 0; j <= d; ++j) {
                double p = 1.0;
                for (int r = 0; r <= d; ++r)
                    if (r != j) p *= s - x[r];
                L[j] = p / denom[j];
            }
            const cplx ph = std::polar(1.0, 2.0 * k * s);
            const cplx ker = volterra_kernel(s, k);
            cplx dker, dph;
            if (with_dk) {
                dker = s * s * volterra_dh(k * s);
                dph = cplx(0.0, 2.0 * s) * ph;
            }
            for (int j = 0; j <= d; ++j) {
                const double wl = wq * L[j];
                pm.alpha[j] += wl * ker;
                pm.gamma[j] += wl * ph;
                pm.beta[j] += wl;
                if (with_dk) {
                    pm.dalpha[j] += wl * dker;
                    pm.dgamma[j] += wl * dph;
                }
            }
        }
    }
    pm.e = std::polar(1.0, 2.0 * k * h);
    pm.kh = volterra_kernel(h, k);
    pm.de = cplx(0.0, 2.0 * h) * pm.e;
    pm.dkh = h * h * volterra_dh(k * h);
    return pm;
}

simd::SweepBatch make_sweep_batch(double h, std::span<const double> ks) {
    if (ks.empty() || ks.size() > 4) throw std::invalid_argument("make_sweep_batch: need 1 to 4 wavenumbers");
    simd::SweepBatch b;
    b.lanes = ks.size();
    const double offsets[4] = {0.0, h, 2.0 * h, 3.0 * h};
    for (std::size_t l = 0; l < 4; ++l) {
        const double k = ks[std::min(l, ks.size() - 1)];
        for (int kind = 0; kind < 3; ++kind) {
            const int d = 3 - kind;
            const PanelMoments pm = panel_moments(std::span<const double>(offsets, d + 1), h, k, false);
            for (int j = 0; j <= d; ++j) {
                b.alpha_re[kind][j][l] = pm.alpha[j].real();
                b.alpha_im[kind][j][l] = pm.alpha[j].imag();
                b.gamma_re[kind][j][l] = pm.gamma[j].real();
                b.gamma_im[kind][j][l] = pm.gamma[j].imag();
                b.beta[kind][j] = pm.beta[j];
            }
            if (kind == 0) {
                b.e_re[l] = pm.e.real();
                b.e_im[l] = pm.e.imag();
                b.kh_re[l] = pm.kh.real();
                b.kh_im[l] = pm.kh.imag();
            }
        }
    }
    return b;
}

}  // namespace dftlab
