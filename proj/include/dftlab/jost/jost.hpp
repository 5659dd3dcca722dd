#pragma once

#include <complex>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "dftlab/jost/moments.hpp"
#include "dftlab/numerics/grid.hpp"
#include "dftlab/numerics/parallel.hpp"
#include "dftlab/potentials/potential.hpp"

namespace dftlab {

/// m(., k) and dm/dr(., k) on every node of the radial grid, with
/// f(r, k) = e^{irk} m(r, k) the Jost solution of the problem truncated at r_max.
struct JostColumn {
    double k = 0.0;
    std::vector<cplx> m;
    std::vector<cplx> dm_dr;
};

/// Adds dm/dk and d^2 m / dr dk from the differentiated sweep.
struct JostDkColumn : JostColumn {
    std::vector<cplx> dm_dk;
    std::vector<cplx> d2m_drdk;
};

/// Backward product-integration sweep of
///   m(r,k) = 1 + int_r^rmax h(k(r'-r)) (r'-r) V(r') m(r',k) dr',   m(r_max) = 1.
/// V m is interpolated by cubics on the stencil {i..i+3} (clipped at r_max)
/// and the kernel integrated exactly per panel, so the scheme is uniformly
/// accurate as k -> 0 and fourth order in the mesh.
JostColumn solve_m(std::span<const double> v, const RadialGrid& grid, double k);
JostColumn solve_m(const PotentialModel& p, const RadialGrid& grid, double k);

/// Exact k-derivative of the discrete sweep; also returns m and dm/dr.
JostDkColumn solve_dm_dk(std::span<const double> v, const RadialGrid& grid, double k);
JostDkColumn solve_dm_dk(const PotentialModel& p, const RadialGrid& grid, double k);

/// Read-only view of one column produced by sweep_many.
struct ColumnView {
    const double* m_re;
    const double* m_im;
    const double* d_re;
    const double* d_im;
    std::size_t stride;
    cplx m(std::size_t i) const { return {m_re[i * stride], m_im[i * stride]}; }
    cplx dm(std::size_t i) const { return {d_re[i * stride], d_im[i * stride]}; }
};

/// Value sweeps for many wavenumbers. Uniform grids run four wavenumbers per
/// call of the active SIMD kernel; other grids use the reference sweep.
/// sink(index into ks, column) may be called concurrently for distinct indices.
void sweep_many(std::span<const double> v, const RadialGrid& grid, std::span<const double> ks,
                const WorkerPool* pool, const std::function<void(std::size_t, const ColumnView&)>& sink);

/// int_0^rmax e^{i kappa r} g(r) dr with g interpolated exactly as in the
/// sweep, evaluated as a direct panel sum (not through the recurrence).
cplx phase_integral(const RadialGrid& grid, std::span<const cplx> g, double kappa);

/// exp(int_0^rmax r |V| dr), the Volterra growth bound.
double volterra_bound(const PotentialModel& p, const RadialGrid& grid);
/// volterra_bound * int_rmax^inf r |V| dr.
double truncation_error(const PotentialModel& p, const RadialGrid& grid);

/// m, dm/dr (and optionally dm/dk) on every stride-th radial node for a list
/// of wavenumbers, stored [k][r].
struct JostTable {
    std::vector<double> r;
    std::vector<std::size_t> r_index;
    std::vector<double> k;
    std::vector<cplx> m;
    std::vector<cplx> dm_dr;
    std::vector<cplx> dm_dk;
    double r_max = 0.0;
    std::size_t n = 0;
    double tail_error = 0.0;
    double growth_bound = 0.0;

    cplx m_at(std::size_t ik, std::size_t ir) const { return m[ik * r.size() + ir]; }
    cplx dm_dr_at(std::size_t ik, std::size_t ir) const { return dm_dr[ik * r.size() + ir]; }
    cplx dm_dk_at(std::size_t ik, std::size_t ir) const { return dm_dk[ik * r.size() + ir]; }
    double sup_abs_m() const;
};

JostTable build_jost_table(const PotentialModel& p, const RadialGrid& grid, std::span<const double> ks,
                           std::size_t stride, bool with_dk, const WorkerPool* pool = nullptr);

/// CSV columns r,k,Re m,Im m,Re dm/dr,Im dm/dr; header comments carry r_max,
/// n, tail_error and the run configuration.
void write_jost_csv(std::ostream& out, const JostTable& table, const nlohmann::json& config);

struct ScatteringData {
    std::vector<double> k;
    std::vector<cplx> f0;   // f(0,k)
    std::vector<cplx> f0p;  // f'(0,k)
    std::vector<double> wronskian_defect;  // Im(f0 conj f0') + k
    cplx dk_f0_at_0;
    cplx f0_at_0;
    double resonance_magnitude = 0.0;  // |f(0,0)|
    double upper_constant = 0.0;       // max |f(0,k)|
    double lower_constant = 0.0;       // min |f(0,k)| (1+k)/k over k > 0

    double max_wronskian_defect() const;
    nlohmann::json summary() const;
};

ScatteringData scattering_at_origin(const PotentialModel& p, const RadialGrid& grid, std::span<const double> ks,
                                    const WorkerPool* pool = nullptr);

/// D(k) from the 2x2 system for c+-, against -2ik f(0,k).
struct DeterminantCheck {
    double k = 0.0;
    cplx from_system;
    cplx from_jost;
    double relative_error = 0.0;
};
DeterminantCheck determinant_identity(const PotentialModel& p, const RadialGrid& grid, double k);

struct ResonanceReport {
    bool resonant = false;
    double magnitude = 0.0;
    double epsilon = 1e-3;
    cplx dk_f0;
    nlohmann::json to_json() const;
};

/// resonant iff |f(0,0)| < epsilon.
ResonanceReport detect_resonance(const PotentialModel& p, const RadialGrid& grid, double epsilon = 1e-3);

}  // namespace dftlab
