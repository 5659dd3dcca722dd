#include "dftlab/spectral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "dftlab/simd/kernels.hpp"

namespace dftlab {

namespace {
const double kNorm = std::sqrt(2.0 / std::numbers::pi);
}

ScatteringCoefficients scattering_coeffs(cplx f0, double k, bool resonant, cplx dk_f0_at_0, double k_eps) {
    cplx ref = f0;
    if (resonant && k < k_eps) {
        ref = dk_f0_at_0;
    } else if (std::abs(f0) == 0.0) {
        throw std::runtime_error("f(0,k) vanishes at k = " + std::to_string(k) +
                                 " > 0, which the Wronskian identity forbids");
    }
    const cplx w = ref / std::abs(ref);
    return {std::conj(w) * std::conj(w) / cplx(0.0, 2.0), cplx(0.0, 0.5)};
}

std::size_t Eigenbasis::bytes() const {
    return table_.size() * sizeof(double) + (probe_m_.size() + probe_dm_.size()) * sizeof(cplx);
}

Eigenbasis build_eigenbasis(const PotentialModel& p, const RadialGrid& rgrid, const SpectralGrid& kgrid,
                            const EigenbasisOptions& options, const WorkerPool* pool) {
    Eigenbasis eb;
    eb.rgrid_ = rgrid;
    eb.kgrid_ = kgrid;
    eb.v_ = p.sample(rgrid.nodes);
    eb.resonance_ = detect_resonance(p, rgrid, options.resonance_epsilon);
    const std::size_t nr = rgrid.size(), nk = kgrid.size();
    eb.table_.assign(nk * nr, 0.0);
    eb.omega_.resize(nk);
    eb.f0_.resize(nk);
    eb.c_plus_.resize(nk);
    eb.probes_ = options.probe_indices;
    for (auto i : eb.probes_)
        if (i >= nr) throw std::invalid_argument("build_eigenbasis: probe index outside the radial grid");
    const std::size_t np = eb.probes_.size();
    eb.probe_m_.resize(nk * np);
    eb.probe_dm_.resize(nk * np);
    sweep_many(eb.v_, rgrid, kgrid.nodes, pool, [&](std::size_t q, const ColumnView& c) {
        const double k = kgrid.nodes[q];
        const cplx f0 = c.m(0);
        const ScatteringCoefficients sc =
            scattering_coeffs(f0, k, eb.resonance_.resonant, eb.resonance_.dk_f0, options.k_eps);
        const cplx ref = (eb.resonance_.resonant && k < options.k_eps) ? eb.resonance_.dk_f0 : f0;
        const cplx w = ref / std::abs(ref);
        eb.omega_[q] = w;
        eb.f0_[q] = f0;
        eb.c_plus_[q] = sc.c_plus;
        double* row = eb.table_.data() + q * nr;
        for (std::size_t i = 0; i < nr; ++i)
            row[i] = std::imag(std::polar(1.0, rgrid.nodes[i] * k) * c.m(i) * std::conj(w));
        for (std::size_t a = 0; a < np; ++a) {
            eb.probe_m_[q * np + a] = c.m(eb.probes_[a]);
            eb.probe_dm_[q * np + a] = c.dm(eb.probes_[a]);
        }
    });
    return eb;
}

double SpectralCoefficients::continuous_energy(std::span<const double> kweights) const {
    double s = 0.0;
    for (std::size_t q = 0; q < real_values.size(); ++q) s += kweights[q] * real_values[q] * real_values[q];
    return s;
}

std::vector<double> forward_real(const Eigenbasis& eb, std::span<const double> x, std::size_t count,
                                 const WorkerPool* pool) {
    const std::size_t nr = eb.nr(), nk = eb.nk();
    if (x.size() != count * nr) throw std::invalid_argument("forward transform: input does not match the radial grid");
    const auto w = eb.rgrid().transform_weights();
    std::vector<double> xw(count * nr);
    for (std::size_t c = 0; c < count; ++c)
        for (std::size_t i = 0; i < nr; ++i) xw[c * nr + i] = kNorm * w[i] * x[c * nr + i];
    std::vector<double> y(count * nk);
    const auto& kern = simd::active_kernels();
    constexpr std::size_t kBlock = 64;
    parallel_for(pool, (nk + kBlock - 1) / kBlock, [&](std::size_t b, std::size_t e) {
        const std::size_t k0 = b * kBlock, k1 = std::min(nk, e * kBlock);
        kern.gemm_nt(count, k1 - k0, nr, xw.data(), nr, eb.table().data() + k0 * nr, nr, y.data() + k0, nk);
    });
    return y;
}

std::vector<double> inverse_real(const Eigenbasis& eb, std::span<const double> y, std::size_t count,
                                 const WorkerPool* pool) {
    const std::size_t nr = eb.nr(), nk = eb.nk();
    if (y.size() != count * nk)
        throw std::invalid_argument("inverse transform: coefficients do not match the spectral grid");
    const auto& W = eb.kgrid().weights;
    std::vector<double> yw(count * nk);
    for (std::size_t c = 0; c < count; ++c)
        for (std::size_t q = 0; q < nk; ++q) yw[c * nk + q] = kNorm * W[q] * y[c * nk + q];
    std::vector<double> x(count * nr);
    const auto& kern = simd::active_kernels();
    constexpr std::size_t rBlock = 512;
    parallel_for(pool, (nr + rBlock - 1) / rBlock, [&](std::size_t b, std::size_t e) {
        const std::size_t r0 = b * rBlock, r1 = std::min(nr, e * rBlock);
        kern.gemm_nn(count, r1 - r0, nk, yw.data(), nk, eb.table().data() + r0, nr, x.data() + r0, nr);
    });
    return x;
}

SpectralCoefficients forward_transform(const Eigenbasis& eb, const BoundStateSet& bound, std::span<const double> f,
                                       const WorkerPool* pool) {
    SpectralCoefficients F;
    F.k = eb.kgrid().nodes;
    F.real_values = forward_real(eb, f, 1, pool);
    F.values.resize(F.k.size());
    for (std::size_t q = 0; q < F.k.size(); ++q) F.values[q] = eb.omega(q) * F.real_values[q];
    const auto w = eb.rgrid().transform_weights();
    for (const auto& s : bound.states) F.bound_components.push_back(inner_product(f, s.u, w));
    double peak = 0.0;
    for (double x : f) peak = std::max(peak, std::abs(x));
    F.truncation_warning = std::abs(f.back()) > 1e-8 * peak;
    return F;
}

std::vector<double> inverse_transform(const Eigenbasis& eb, const SpectralCoefficients& F, const WorkerPool* pool) {
    return inverse_real(eb, F.real_values, 1, pool);
}

double inner_product(std::span<const double> f, std::span<const double> g, std::span<const double> w) {
    if (f.size() != g.size() || f.size() != w.size()) throw std::invalid_argument("inner_product: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i] * g[i];
    return s;
}

double l2_norm(std::span<const double> f, std::span<const double> w) { return std::sqrt(inner_product(f, f, w)); }

std::vector<double> project_continuous(const BoundStateSet& bound, std::span<const double> f,
                                       std::span<const double> weights) {
    std::vector<double> out(f.begin(), f.end());
    for (const auto& s : bound.states) {
        const double c = inner_product(f, s.u, weights);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * s.u[i];
    }
    return out;
}

std::vector<double> lift_radial(std::span<const double> f, std::span<const double> r) {
    if (f.size() != r.size()) throw std::invalid_argument("lift_radial: size mismatch");
    const double c = std::sqrt(4.0 * std::numbers::pi);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = c * r[i] * f[i];
    return out;
}

std::vector<double> lower_radial(std::span<const double> ft, std::span<const double> r) {
    if (ft.size() != r.size() || r.size() < 3) throw std::invalid_argument("lower_radial: need matching grids of size >= 3");
    const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    std::vector<double> out(ft.size());
    for (std::size_t i = 0; i < ft.size(); ++i)
        if (r[i] > 0) out[i] = c * ft[i] / r[i];
    if (r[0] == 0.0) {
        const double g1 = out[1], g2 = out[2];
        out[0] = g1 - r[1] * (g2 - g1) / (r[2] - r[1]);
    }
    return out;
}

void write_coefficients_csv(std::ostream& out, const SpectralCoefficients& F, const nlohmann::json& config) {
    out << "# config=" << config.dump() << '\n' << std::setprecision(17);
    out << "k,re_F,im_F\n";
    for (std::size_t q = 0; q < F.k.size(); ++q)
        out << F.k[q] << ',' << F.values[q].real() << ',' << F.values[q].imag() << '\n';
}

void write_eigenbasis_csv(std::ostream& out, const Eigenbasis& eb, std::size_t r_stride, std::size_t k_stride,
                          const nlohmann::json& config) {
    out << "# config=" << config.dump() << '\n' << std::setprecision(17);
    out << "r,k,re_e,im_e\n";
    for (std::size_t q = 0; q < eb.nk(); q += std::max<std::size_t>(1, k_stride))
        for (std::size_t i = 0; i < eb.nr(); i += std::max<std::size_t>(1, r_stride)) {
            const cplx z = eb.e_tilde(q, i);
            out << eb.rgrid().nodes[i] << ',' << eb.kgrid().nodes[q] << ',' << z.real() << ',' << z.imag() << '\n';
        }
}

}  // namespace dftlab
