#pragma once

#include <array>
#include <complex>
#include <span>

#include "dftlab/simd/kernels.hpp"

namespace dftlab {

using cplx = std::complex<double>;

/// h(a) = (e^{2ia} - 1) / (2ia) = e^{ia} sin(a) / a, and its derivative.
cplx volterra_h(double a);
cplx volterra_dh(double a);

/// K(s) = (e^{2iks} - 1) / (2ik) = s h(ks); equals s at k = 0.
inline cplx volterra_kernel(double s, double k) { return s * volterra_h(k * s); }

/// Product-integration weights for one panel [r_i, r_i + h] whose integrand
/// V m is interpolated through stencil offsets x_0 = 0 < x_1 < ... < x_d.
struct PanelMoments {
    int degree = 3;
    std::array<cplx, 4> alpha{};   // int_0^h K(s) L_j(s) ds
    std::array<cplx, 4> gamma{};   // int_0^h e^{2iks} L_j(s) ds
    std::array<double, 4> beta{};  // int_0^h L_j(s) ds
    std::array<cplx, 4> dalpha{};  // d/dk alpha_j
    std::array<cplx, 4> dgamma{};  // d/dk gamma_j
    cplx e, kh, de, dkh;           // e^{2ikh}, K(h) and their k-derivatives
};

PanelMoments panel_moments(std::span<const double> offsets, double h, double k, bool with_dk);

/// SIMD sweep coefficients for up to four wavenumbers on a uniform grid with
/// spacing h; unused lanes repeat the last wavenumber.
simd::SweepBatch make_sweep_batch(double h, std::span<const double> ks);

}  // namespace dftlab
