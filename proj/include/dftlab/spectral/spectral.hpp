#pragma once

#include <complex>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/jost/jost.hpp"
#include "dftlab/numerics/grid.hpp"
#include "dftlab/numerics/parallel.hpp"
#include "dftlab/potentials/potential.hpp"

namespace dftlab {

struct ScatteringCoefficients {
    cplx c_plus;
    cplx c_minus;
};

/// c+(k) = conj(f(0,k)) / (2i f(0,k)), c-(k) = -1/(2i). In the resonant case
/// and for k < k_eps the limit conj(dk f(0,0)) / (2i dk f(0,0)) is used.
/// Throws if f(0,k) vanishes at some k > 0.
ScatteringCoefficients scattering_coeffs(cplx f0, double k, bool resonant, cplx dk_f0_at_0, double k_eps = 1e-3);

struct EigenbasisOptions {
    double k_eps = 1e-3;
    double resonance_epsilon = 1e-3;
    /// Radial node indices at which m and dm/dr are kept (kernel pieces).
    std::vector<std::size_t> probe_indices;
};

/// Generalised eigenfunctions on RadialGrid x SpectralGrid.
///
/// e_tilde(r,k) = c+ f + c- conj f = conj(omega_k) e(r,k), where omega_k is
/// the phase of f(0,k) and e(r,k) = Im(f(r,k) conj omega_k) is real. The
/// table keeps the real part e, row-major [k][r]; transforms act on
/// F_real(k) = sqrt(2/pi) int e f dr with F(k) = omega_k F_real(k).
class Eigenbasis {
public:
    const RadialGrid& rgrid() const { return rgrid_; }
    const SpectralGrid& kgrid() const { return kgrid_; }
    std::size_t nr() const { return rgrid_.size(); }
    std::size_t nk() const { return kgrid_.size(); }

    double e(std::size_t ik, std::size_t ir) const { return table_[ik * nr() + ir]; }
    std::span<const double> row(std::size_t ik) const { return {table_.data() + ik * nr(), nr()}; }
    const std::vector<double>& table() const { return table_; }

    cplx omega(std::size_t ik) const { return omega_[ik]; }
    cplx f0(std::size_t ik) const { return f0_[ik]; }
    cplx c_plus(std::size_t ik) const { return c_plus_[ik]; }
    static constexpr cplx c_minus() { return cplx(0.0, 0.5); }
    cplx e_tilde(std::size_t ik, std::size_t ir) const { return std::conj(omega_[ik]) * e(ik, ir); }

    bool resonant() const { return resonance_.resonant; }
    const ResonanceReport& resonance() const { return resonance_; }
    const std::vector<double>& potential_samples() const { return v_; }

    const std::vector<std::size_t>& probe_indices() const { return probes_; }
    /// m and dm/dr at probe p for wavenumber ik.
    cplx probe_m(std::size_t ik, std::size_t p) const { return probe_m_[ik * probes_.size() + p]; }
    cplx probe_dm(std::size_t ik, std::size_t p) const { return probe_dm_[ik * probes_.size() + p]; }

    std::size_t bytes() const;

    friend Eigenbasis build_eigenbasis(const PotentialModel&, const RadialGrid&, const SpectralGrid&,
                                       const EigenbasisOptions&, const WorkerPool*);

private:
    RadialGrid rgrid_;
    SpectralGrid kgrid_;
    std::vector<double> v_;
    std::vector<double> table_;
    std::vector<cplx> omega_, f0_, c_plus_;
    ResonanceReport resonance_;
    std::vector<std::size_t> probes_;
    std::vector<cplx> probe_m_, probe_dm_;
};

Eigenbasis build_eigenbasis(const PotentialModel& p, const RadialGrid& rgrid, const SpectralGrid& kgrid,
                            const EigenbasisOptions& options = {}, const WorkerPool* pool = nullptr);

struct SpectralCoefficients {
    std::vector<double> k;
    std::vector<cplx> values;        // (F f)(k)
    std::vector<double> real_values; // F_real(k), values = omega F_real
    std::vector<double> bound_components;
    bool truncation_warning = false;

    /// int |F|^2 dk on the spectral grid.
    double continuous_energy(std::span<const double> kweights) const;
};

/// Batched real transforms. x and y are row-major [count][nr] and [count][nk].
std::vector<double> forward_real(const Eigenbasis& eb, std::span<const double> x, std::size_t count,
                                 const WorkerPool* pool = nullptr);
std::vector<double> inverse_real(const Eigenbasis& eb, std::span<const double> y, std::size_t count,
                                 const WorkerPool* pool = nullptr);

SpectralCoefficients forward_transform(const Eigenbasis& eb, const BoundStateSet& bound, std::span<const double> f,
                                       const WorkerPool* pool = nullptr);
/// Uses F.real_values (the phase-stripped coefficients).
std::vector<double> inverse_transform(const Eigenbasis& eb, const SpectralCoefficients& F,
                                      const WorkerPool* pool = nullptr);

/// f - sum_b <f, phi_b> phi_b.
std::vector<double> project_continuous(const BoundStateSet& bound, std::span<const double> f,
                                       std::span<const double> weights);

/// f_tilde = sqrt(4 pi) r f(r) and its inverse; lower_radial recovers the
/// value at r = 0 by linear extrapolation of f_tilde / r from the next two nodes.
std::vector<double> lift_radial(std::span<const double> f, std::span<const double> r);
std::vector<double> lower_radial(std::span<const double> ft, std::span<const double> r);

/// sum_i w_i f_i g_i.
double inner_product(std::span<const double> f, std::span<const double> g, std::span<const double> w);
double l2_norm(std::span<const double> f, std::span<const double> w);

void write_coefficients_csv(std::ostream& out, const SpectralCoefficients& F, const nlohmann::json& config);
void write_eigenbasis_csv(std::ostream& out, const Eigenbasis& eb, std::size_t r_stride, std::size_t k_stride,
                          const nlohmann::json& config);

}  // namespace dftlab
