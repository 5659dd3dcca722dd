#include "dftlab/jost/jost.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "dftlab/numerics/quadrature.hpp"
#include "dftlab/simd/kernels.hpp"

namespace dftlab {

namespace {

int stencil_degree(std::size_t n, std::size_t i) { return static_cast<int>(std::min<std::size_t>(3, n - 1 - i)); }

/// Moments for panel i; uniform grids reuse three cached panel kinds.
class MomentSource {
public:
    MomentSource(const RadialGrid& grid, double k, bool with_dk) : grid_(grid), k_(k), dk_(with_dk) {
        if (grid.is_uniform()) {
            const double h = grid.spacing();
            const double x[4] = {0.0, h, 2.0 * h, 3.0 * h};
            for (int d = 1; d <= 3; ++d) cache_[d] = panel_moments(std::span<const double>(x, d + 1), h, k, with_dk);
        }
    }

    const PanelMoments& at(std::size_t i) {
        const std::size_t n = grid_.size();
        const int d = stencil_degree(n, i);
        if (grid_.is_uniform()) return cache_[d];
        double x[4];
        for (int j = 0; j <= d; ++j) x[j] = grid_.nodes[i + j] - grid_.nodes[i];
        scratch_ = panel_moments(std::span<const double>(x, d + 1), x[1], k_, dk_);
        return scratch_;
    }

private:
    const RadialGrid& grid_;
    double k_;
    bool dk_;
    PanelMoments cache_[4];
    PanelMoments scratch_;
};

JostDkColumn reference_sweep(std::span<const double> v, const RadialGrid& grid, double k, bool with_dk) {
    const std::size_t n = grid.size();
    if (v.size() != n) throw std::invalid_argument("jost sweep: potential samples do not match the grid");
    if (k < 0) throw std::invalid_argument("jost sweep: k must be non-negative");
    JostDkColumn c;
    c.k = k;
    c.m.assign(n, 1.0);
    c.dm_dr.assign(n, 0.0);
    if (with_dk) {
        c.dm_dk.assign(n, 0.0);
        c.d2m_drdk.assign(n, 0.0);
    }
    std::vector<cplx> g(n), dI(with_dk ? n : 0, 0.0);
    MomentSource src(grid, k, with_dk);
    const std::size_t last = n - 1;
    g[last] = v[last];
    cplx I = 0.0, B = 0.0, J = 0.0, dB = 0.0, dJ = 0.0;
    for (std::size_t i = last; i-- > 0;) {
        const PanelMoments& pm = src.at(i);
        const int d = pm.degree;
        cplx A = 0.0, P = 0.0, Q = 0.0;
        for (int j = 1; j <= d; ++j) {
            A += pm.alpha[j] * g[i + j];
            P += pm.gamma[j] * g[i + j];
            Q += pm.beta[j] * g[i + j];
        }
        const cplx a0v = pm.alpha[0] * v[i];
        const cplx den = 1.0 - a0v;
        const cplx I_next = I, B_next = B, J_next = J;
        I = (A + pm.e * I_next + pm.kh * B_next + a0v) / den;
        c.m[i] = 1.0 + I;
        g[i] = v[i] * c.m[i];
        B = Q + pm.beta[0] * g[i] + B_next;
        J = P + pm.gamma[0] * g[i] + pm.e * J_next;
        c.dm_dr[i] = -J;
        if (with_dk) {
            cplx num = pm.de * I_next + pm.e * dI[i + 1] + pm.dkh * B_next + pm.kh * dB;
            cplx sb = 0.0, sj = 0.0;
            for (int j = 0; j <= d; ++j) {
                num += pm.dalpha[j] * g[i + j];
                sj += pm.dgamma[j] * g[i + j];
            }
            for (int j = 1; j <= d; ++j) {
                const cplx vd = v[i + j] * dI[i + j];
                num += pm.alpha[j] * vd;
                sb += pm.beta[j] * vd;
                sj += pm.gamma[j] * vd;
            }
            dI[i] = num / den;
            const cplx v0d = v[i] * dI[i];
            sb += pm.beta[0] * v0d;
            sj += pm.gamma[0] * v0d;
            dB = sb + dB;
            dJ = sj + pm.de * J_next + pm.e * dJ;
            c.dm_dk[i] = dI[i];
            c.d2m_drdk[i] = -dJ;
        }
    }
    return c;
}

}  // namespace

JostColumn solve_m(std::span<const double> v, const RadialGrid& grid, double k) {
    JostDkColumn c = reference_sweep(v, grid, k, false);
    return JostColumn{c.k, std::move(c.m), std::move(c.dm_dr)};
}

JostColumn solve_m(const PotentialModel& p, const RadialGrid& grid, double k) {
    const auto v = p.sample(grid.nodes);
    return solve_m(v, grid, k);
}

JostDkColumn solve_dm_dk(std::span<const double> v, const RadialGrid& grid, double k) {
    return reference_sweep(v, grid, k, true);
}

JostDkColumn solve_dm_dk(const PotentialModel& p, const RadialGrid& grid, double k) {
    const auto v = p.sample(grid.nodes);
    return solve_dm_dk(v, grid, k);
}

void sweep_many(std::span<const double> v, const RadialGrid& grid, std::span<const double> ks,
                const WorkerPool* pool, const std::function<void(std::size_t, const ColumnView&)>& sink) {
    const std::size_t n = grid.size();
    if (v.size() != n) throw std::invalid_argument("sweep_many: potential samples do not match the grid");
    if (!grid.is_uniform()) {
        parallel_for(pool, ks.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q) {
                const JostColumn c = solve_m(v, grid, ks[q]);
                const auto* mp = reinterpret_cast<const double*>(c.m.data());
                const auto* dp = reinterpret_cast<const double*>(c.dm_dr.data());
                sink(q, ColumnView{mp, mp + 1, dp, dp + 1, 2});
            }
        });
        return;
    }
    const auto& kern = simd::active_kernels();
    const double h = grid.spacing();
    const std::size_t batches = (ks.size() + 3) / 4;
    parallel_for(pool, batches, [&](std::size_t b, std::size_t e) {
        std::vector<double> buf(16 * n);
        const simd::SweepOut out{buf.data(), buf.data() + 4 * n, buf.data() + 8 * n, buf.data() + 12 * n};
        for (std::size_t q = b; q < e; ++q) {
            const std::size_t first = 4 * q, count = std::min<std::size_t>(4, ks.size() - first);
            const simd::SweepBatch batch = make_sweep_batch(h, ks.subspan(first, count));
            kern.jost_sweep(n, v.data(), batch, out);
            for (std::size_t l = 0; l < count; ++l)
                sink(first + l, ColumnView{out.m_re + l, out.m_im + l, out.d_re + l, out.d_im + l, 4});
        }
    });
}

cplx phase_integral(const RadialGrid& grid, std::span<const cplx> g, double kappa) {
    const std::size_t n = grid.size();
    if (g.size() != n) throw std::invalid_argument("phase_integral: size mismatch");
    const double k = 0.5 * std::abs(kappa);
    MomentSource src(grid, k, false);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const PanelMoments& pm = src.at(i);
        cplx s = 0.0;
        for (int j = 0; j <= pm.degree; ++j) s += (kappa >= 0 ? pm.gamma[j] : std::conj(pm.gamma[j])) * g[i + j];
        total += std::polar(1.0, kappa * grid.nodes[i]) * s;
    }
    return total;
}

double volterra_bound(const PotentialModel& p, const RadialGrid& grid) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights[i] * grid.nodes[i] * std::abs(p(grid.nodes[i]));
    return std::exp(s);
}

double truncation_error(const PotentialModel& p, const RadialGrid& grid) {
    if (p.is_zero()) return 0.0;
    return volterra_bound(p, grid) * p.tail_moment(grid.r_max);
}

double JostTable::sup_abs_m() const {
    double s = 0.0;
    for (const auto& z : m) s = std::max(s, std::abs(z));
    return s;
}

JostTable build_jost_table(const PotentialModel& p, const RadialGrid& grid, std::span<const double> ks,
                           std::size_t stride, bool with_dk, const WorkerPool* pool) {
    if (stride == 0) throw std::invalid_argument("build_jost_table: stride must be positive");
    JostTable t;
    t.r_max = grid.r_max;
    t.n = grid.size();
    t.k.assign(ks.begin(), ks.end());
    for (std::size_t i = 0; i < grid.size(); i += stride) t.r_index.push_back(i);
    if (t.r_index.back() != grid.size() - 1) t.r_index.push_back(grid.size() - 1);
    for (auto i : t.r_index) t.r.push_back(grid.nodes[i]);
    const std::size_t nr = t.r.size();
    t.m.resize(ks.size() * nr);
    t.dm_dr.resize(ks.size() * nr);
    const auto v = p.sample(grid.nodes);
    sweep_many(v, grid, ks, pool, [&](std::size_t q, const ColumnView& c) {
        for (std::size_t a = 0; a < nr; ++a) {
            t.m[q * nr + a] = c.m(t.r_index[a]);
            t.dm_dr[q * nr + a] = c.dm(t.r_index[a]);
        }
    });
    if (with_dk) {
        t.dm_dk.resize(ks.size() * nr);
        parallel_for(pool, ks.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q) {
                const JostDkColumn c = solve_dm_dk(v, grid, ks[q]);
                for (std::size_t a = 0; a < nr; ++a) t.dm_dk[q * nr + a] = c.dm_dk[t.r_index[a]];
            }
        });
    }
    t.growth_bound = volterra_bound(p, grid);
    t.tail_error = truncation_error(p, grid);
    return t;
}

void write_jost_csv(std::ostream& out, const JostTable& t, const nlohmann::json& config) {
    out << "# config=" << config.dump() << '\n';
    out << "# r_max=" << std::setprecision(17) << t.r_max << " n=" << t.n << " tail_error=" << t.tail_error << '\n';
    out << "r,k,re_m,im_m,re_dm_dr,im_dm_dr\n";
    for (std::size_t q = 0; q < t.k.size(); ++q)
        for (std::size_t a = 0; a < t.r.size(); ++a) {
            const cplx m = t.m_at(q, a), d = t.dm_dr_at(q, a);
            out << t.r[a] << ',' << t.k[q] << ',' << m.real() << ',' << m.imag() << ',' << d.real() << ','
                << d.imag() << '\n';
        }
}

double ScatteringData::max_wronskian_defect() const {
    double s = 0.0;
    for (double d : wronskian_defect) s = std::max(s, std::abs(d));
    return s;
}

nlohmann::json ScatteringData::summary() const {
    return {{"points", k.size()},
            {"max_wronskian_defect", max_wronskian_defect()},
            {"resonance_magnitude", resonance_magnitude},
            {"f0_at_0", {f0_at_0.real(), f0_at_0.imag()}},
            {"dk_f0_at_0", {dk_f0_at_0.real(), dk_f0_at_0.imag()}},
            {"upper_constant", upper_constant},
            {"lower_constant", lower_constant}};
}

ScatteringData scattering_at_origin(const PotentialModel& p, const RadialGrid& grid, std::span<const double> ks,
                                    const WorkerPool* pool) {
    ScatteringData s;
    s.k.assign(ks.begin(), ks.end());
    s.f0.resize(ks.size());
    s.f0p.resize(ks.size());
    s.wronskian_defect.resize(ks.size());
    const auto v = p.sample(grid.nodes);
    sweep_many(v, grid, ks, pool, [&](std::size_t q, const ColumnView& c) {
        const double k = ks[q];
        s.f0[q] = c.m(0);
        s.f0p[q] = cplx(0.0, k) * c.m(0) + c.dm(0);
        s.wronskian_defect[q] = std::imag(s.f0[q] * std::conj(s.f0p[q])) + k;
    });
    const JostDkColumn zero = solve_dm_dk(v, grid, 0.0);
    s.f0_at_0 = zero.m[0];
    s.dk_f0_at_0 = zero.dm_dk[0];
    s.resonance_magnitude = std::abs(zero.m[0]);
    s.lower_constant = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < ks.size(); ++q) {
        const double a = std::abs(s.f0[q]);
        s.upper_constant = std::max(s.upper_constant, a);
        if (ks[q] > 0) s.lower_constant = std::min(s.lower_constant, a * (1.0 + ks[q]) / ks[q]);
    }
    return s;
}

DeterminantCheck determinant_identity(const PotentialModel& p, const RadialGrid& grid, double k) {
    const auto v = p.sample(grid.nodes);
    const JostColumn c = solve_m(v, grid, k);
    const cplx f0 = c.m[0];
    const cplx f0p = cplx(0.0, k) * f0 + c.dm_dr[0];
    // int e^{irk} V [f0 conj f(r) - conj f0 f(r)] dr with f = e^{irk} m
    std::vector<cplx> gm(grid.size()), gc(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        gm[i] = v[i] * c.m[i];
        gc[i] = std::conj(gm[i]);
    }
    DeterminantCheck d;
    d.k = k;
    d.from_system = f0 * std::conj(f0p) - std::conj(f0) * f0p + f0 * phase_integral(grid, gc, 0.0) -
                    std::conj(f0) * phase_integral(grid, gm, 2.0 * k);
    d.from_jost = cplx(0.0, -2.0 * k) * f0;
    d.relative_error = std::abs(d.from_system - d.from_jost) / std::abs(d.from_jost);
    return d;
}

nlohmann::json ResonanceReport::to_json() const {
    return {{"resonant", resonant},
            {"magnitude", magnitude},
            {"epsilon", epsilon},
            {"dk_f0_at_0", {dk_f0.real(), dk_f0.imag()}}};
}

ResonanceReport detect_resonance(const PotentialModel& p, const RadialGrid& grid, double epsilon) {
    const JostDkColumn c = solve_dm_dk(p, grid, 0.0);
    ResonanceReport r;
    r.magnitude = std::abs(c.m[0]);
    r.epsilon = epsilon;
    r.resonant = r.magnitude < epsilon;
    r.dk_f0 = c.dm_dk[0];
    return r;
}

}  // namespace dftlab
