#include "dftlab/multiplier/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dftlab/jost/jost.hpp"
#include "dftlab/numerics/fit.hpp"
#include "dftlab/simd/kernels.hpp"

namespace dftlab {

std::string to_string(Support s) {
    switch (s) {
        case Support::high: return "high";
        case Support::low: return "low";
        case Support::full: return "full";
    }
    return "?";
}

Multiplier::Multiplier(std::string label, Support support, Fn fn, double declared_bound)
    : label_(std::move(label)), support_(support), fn_(std::move(fn)), declared_bound_(declared_bound) {
    if (!fn_) throw std::invalid_argument("Multiplier: empty function");
}

std::array<double, 4> Multiplier::derivatives(double k) const {
    const Jet j = fn_(Jet::variable(k));
    return {j.derivative(0), j.derivative(1), j.derivative(2), j.derivative(3)};
}

std::vector<double> Multiplier::sample(std::span<const double> ks) const {
    std::vector<double> out(ks.size());
    for (std::size_t q = 0; q < ks.size(); ++q) out[q] = (*this)(ks[q]);
    return out;
}

Multiplier constant_multiplier(double c) {
    return Multiplier("constant(" + std::to_string(c) + ")", Support::full, [c](const Jet&) { return Jet::constant(c); });
}

Multiplier partition_block(const DyadicPartition& partition, int j) {
    if (j < partition.j_min() || j > partition.j_max())
        throw std::invalid_argument("partition_block: j outside the partition range");
    return Multiplier("block(" + std::to_string(j) + ")", Support::full,
                      [partition, j](const Jet& k) { return partition.block(j, k); });
}

Multiplier lp_block(const BumpFunction& bump, int j) {
    const double s = std::ldexp(1.0, -j);
    const Support sup = j <= -1 ? Support::low : (j >= 1 ? Support::high : Support::full);
    return Multiplier("psi(2^" + std::to_string(-j) + "k)", sup, [bump, s](const Jet& k) { return bump.psi(s * k); });
}

Multiplier high_pass(const BumpFunction& bump) {
    return Multiplier("high_pass", Support::high, [bump](const Jet& k) { return 1.0 - bump.chi(k); });
}

Multiplier low_pass(const BumpFunction& bump) {
    return Multiplier("low_pass", Support::low, [bump](const Jet& k) { return bump.chi(2.0 * k); });
}

Multiplier random_sign_lp(const DyadicPartition& partition, std::span<const int> signs) {
    const int nb = partition.j_max() - partition.j_min() + 1;
    if (signs.size() != static_cast<std::size_t>(nb))
        throw std::invalid_argument("random_sign_lp: need one sign per partition block");
    std::vector<int> s(signs.begin(), signs.end());
    return Multiplier("random_sign_lp", Support::full, [partition, s](const Jet& k) {
        Jet acc = Jet::constant(0.0);
        for (int j = partition.j_min(); j <= partition.j_max(); ++j) {
            const int sg = s[j - partition.j_min()];
            if (sg != 0) acc += double(sg) * partition.block(j, k);
        }
        return acc;
    });
}

Multiplier sin_log() {
    return Multiplier("sin(log k)", Support::full, [](const Jet& k) { return sin(log(k)); });
}

Multiplier product(const Multiplier& a, const Multiplier& b) {
    Support s = Support::full;
    if (a.support() == b.support()) s = a.support();
    else if (a.support() == Support::full) s = b.support();
    else if (b.support() == Support::full) s = a.support();
    return Multiplier(a.label() + "*" + b.label(), s, [a, b](const Jet& k) { return a(k) * b(k); },
                      a.declared_bound() * b.declared_bound());
}

std::vector<double> mikhlin_samples(int lo_octave, int hi_octave, int per_octave) {
    if (hi_octave <= lo_octave || per_octave < 1) throw std::invalid_argument("mikhlin_samples: empty range");
    std::vector<double> ks;
    for (int t = lo_octave * per_octave; t <= hi_octave * per_octave; ++t) {
        const int q = t >= 0 ? t / per_octave : -((-t + per_octave - 1) / per_octave);
        const int rem = t - q * per_octave;
        ks.push_back(std::ldexp(std::exp2(double(rem) / per_octave), q));
    }
    return ks;
}

nlohmann::json MikhlinReport::to_json() const {
    return {{"constants", constants}, {"bound", std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json("inf")},
            {"pass", pass}};
}

MikhlinReport check_mikhlin(const Multiplier& mu, std::span<const double> ks, double bound) {
    MikhlinReport rep;
    rep.bound = std::isnan(bound) ? mu.declared_bound() : bound;
    for (double k : ks) {
        if (!(k > 0)) continue;
        const auto d = mu.derivatives(k);
        double kl = 1.0;
        for (int l = 0; l < 4; ++l) {
            rep.constants[l] = std::max(rep.constants[l], kl * std::abs(d[l]));
            if (!std::isfinite(d[l])) rep.constants[l] = std::numeric_limits<double>::infinity();
            kl *= k;
        }
    }
    rep.pass = true;
    for (double c : rep.constants) rep.pass = rep.pass && std::isfinite(c) && c <= rep.bound;
    return rep;
}

bool verify_support(const Multiplier& mu, std::span<const double> ks) {
    for (double k : ks) {
        const bool must_vanish = (mu.support() == Support::high && k < 1.0) || (mu.support() == Support::low && k > 1.0);
        if (must_vanish && mu(k) != 0.0) return false;
    }
    return true;
}

std::vector<double> apply_multiplier_batch(const Eigenbasis& eb, const BoundStateSet& bound,
                                           std::span<const double> mu_on_grid, std::span<const double> x,
                                           std::size_t count, const WorkerPool* pool) {
    const std::size_t nr = eb.nr(), nk = eb.nk();
    if (mu_on_grid.size() != nk) throw std::invalid_argument("apply_multiplier: mu does not match the spectral grid");
    if (x.size() != count * nr) throw std::invalid_argument("apply_multiplier: input does not match the radial grid");
    const auto w = eb.rgrid().transform_weights();
    std::vector<double> xc(x.begin(), x.end());
    for (std::size_t c = 0; c < count; ++c) {
        auto p = project_continuous(bound, {x.data() + c * nr, nr}, w);
        std::copy(p.begin(), p.end(), xc.begin() + c * nr);
    }
    auto y = forward_real(eb, xc, count, pool);
    for (std::size_t c = 0; c < count; ++c)
        for (std::size_t q = 0; q < nk; ++q) y[c * nk + q] *= mu_on_grid[q];
    return inverse_real(eb, y, count, pool);
}

std::vector<double> apply_multiplier(const Eigenbasis& eb, const BoundStateSet& bound, const Multiplier& mu,
                                     std::span<const double> f, const WorkerPool* pool) {
    const auto m = mu.sample(eb.kgrid().nodes);
    return apply_multiplier_batch(eb, bound, m, f, 1, pool);
}

double Matrix::max_abs() const {
    double s = 0.0;
    for (double x : a) s = std::max(s, std::abs(x));
    return s;
}

namespace {

constexpr std::size_t kChunk = 512;

/// out[a][b] += scale * sum_t X[a][t] w[t] Y[b][t] over chunks of k.
struct Term {
    Matrix* out;
    int x, y;
    double scale;
    int weight = 0;
};

using FillFn = std::function<void(std::size_t q, std::size_t t, std::size_t ld, std::vector<std::vector<double>>& f)>;

void accumulate(std::span<const std::size_t> qs, const std::vector<std::vector<double>>& weights, std::size_t rows,
                std::size_t cols, int nfeat, const FillFn& fill, std::span<const Term> terms, const WorkerPool* pool) {
    const auto& kern = simd::active_kernels();
    std::vector<std::vector<double>> feat(nfeat, std::vector<double>(std::max(rows, cols) * kChunk));
    std::vector<double> xw(rows * kChunk), tmp(rows * cols);
    for (std::size_t c0 = 0; c0 < qs.size(); c0 += kChunk) {
        const std::size_t ch = std::min(kChunk, qs.size() - c0);
        parallel_for(pool, ch, [&](std::size_t b, std::size_t e) {
            for (std::size_t t = b; t < e; ++t) fill(qs[c0 + t], t, ch, feat);
        });
        for (const Term& term : terms) {
            const auto& w = weights[term.weight];
            const auto& X = feat[term.x];
            for (std::size_t a = 0; a < rows; ++a)
                for (std::size_t t = 0; t < ch; ++t) xw[a * ch + t] = X[a * ch + t] * w[c0 + t];
            const auto& Y = feat[term.y];
            constexpr std::size_t kRows = 32;
            parallel_for(pool, (rows + kRows - 1) / kRows, [&](std::size_t b, std::size_t e) {
                const std::size_t r0 = b * kRows, r1 = std::min(rows, e * kRows);
                kern.gemm_nt(r1 - r0, cols, ch, xw.data() + r0 * ch, ch, Y.data(), ch, tmp.data() + r0 * cols, cols);
            });
            auto& out = term.out->a;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += term.scale * tmp[i];
        }
    }
}

double spacing_of(const std::vector<double>& r) {
    if (r.size() < 2) return 0.0;
    return (r.back() - r.front()) / double(r.size() - 1);
}

}  // namespace

Matrix assemble_kernel(const Eigenbasis& eb, const Multiplier& mu, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols, const WorkerPool* pool) {
    if (rows.size() * cols.size() > kMaxKernelEntries)
        throw std::length_error("assemble_kernel: " + std::to_string(rows.size()) + " x " + std::to_string(cols.size()) +
                                " entries exceed the kernel memory guard");
    for (auto i : rows)
        if (i >= eb.nr()) throw std::invalid_argument("assemble_kernel: row index outside the radial grid");
    for (auto i : cols)
        if (i >= eb.nr()) throw std::invalid_argument("assemble_kernel: column index outside the radial grid");
    const auto& kg = eb.kgrid();
    std::vector<std::size_t> qs;
    std::vector<std::vector<double>> w(1);
    for (std::size_t q = 0; q < kg.size(); ++q) {
        const double m = mu(kg.nodes[q]);
        if (m != 0.0) {
            qs.push_back(q);
            w[0].push_back(kg.weights[q] * m);
        }
    }
    Matrix K(rows.size(), cols.size());
    if (qs.empty()) return K;
    const FillFn fill = [&](std::size_t q, std::size_t t, std::size_t ld, std::vector<std::vector<double>>& f) {
        const auto row = eb.row(q);
        for (std::size_t a = 0; a < rows.size(); ++a) f[0][a * ld + t] = row[rows[a]];
        for (std::size_t b = 0; b < cols.size(); ++b) f[1][b * ld + t] = row[cols[b]];
    };
    const Term terms[] = {{&K, 0, 1, 2.0 / std::numbers::pi}};
    accumulate(qs, w, rows.size(), cols.size(), 2, fill, terms, pool);
    return K;
}

std::vector<std::size_t> kernel_indices(const RadialGrid& grid, double r_hi, std::size_t stride) {
    if (stride == 0) throw std::invalid_argument("kernel_indices: stride must be positive");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size() && grid.nodes[i] <= r_hi; i += stride) idx.push_back(i);
    return idx;
}

KernelDecomposition decompose_kernel(const Eigenbasis& eb, const Multiplier& mu, const DyadicPartition* partition,
                                     const WorkerPool* pool) {
    if (mu.support() == Support::full)
        throw std::invalid_argument("decompose_kernel: support must be high or low, got full");
    const auto& probes = eb.probe_indices();
    const std::size_t P = probes.size();
    if (P < 3) throw std::invalid_argument("decompose_kernel: the eigenbasis carries fewer than 3 probe points");
    const auto& kg = eb.kgrid();
    const auto& rg = eb.rgrid();
    const double pi = std::numbers::pi;

    KernelDecomposition d;
    d.support = mu.support();
    d.resonant = eb.resonant();
    for (auto i : probes) d.r.push_back(rg.nodes[i]);
    d.spacing = spacing_of(d.r);
    d.K = Matrix(P, P);
    d.Kpp_re = Matrix(P, P);
    d.Kpp_im = Matrix(P, P);
    d.K3 = Matrix(P, P);
    d.K1 = Matrix(P, P);

    const bool low = mu.support() == Support::low;
    std::vector<double> dm0(P, 0.0);
    d.m0.assign(P, 1.0);
    if (low) {
        const JostColumn c0 = solve_m(eb.potential_samples(), rg, 0.0);
        for (std::size_t a = 0; a < P; ++a) {
            d.m0[a] = c0.m[probes[a]].real();
            dm0[a] = c0.dm_dr[probes[a]].real();
        }
    }

    std::vector<std::size_t> qs;
    std::vector<std::vector<double>> w(1);
    std::vector<double> mus;
    for (std::size_t q = 0; q < kg.size(); ++q) {
        const double m = mu(kg.nodes[q]);
        if (m != 0.0) {
            qs.push_back(q);
            mus.push_back(m);
            w[0].push_back(kg.weights[q] * m);
        }
    }

    // features: 0 e, 1 cos, 2 sin, 3 Re f, 4 Im f, 5 Re c+f, 6 Im c+f
    const FillFn fill = [&](std::size_t q, std::size_t t, std::size_t ld, std::vector<std::vector<double>>& f) {
        const double k = kg.nodes[q];
        const cplx cp = eb.c_plus(q);
        for (std::size_t a = 0; a < P; ++a) {
            const std::size_t o = a * ld + t;
            f[0][o] = eb.e(q, probes[a]);
            const cplx ph = std::polar(1.0, d.r[a] * k);
            f[1][o] = d.m0[a] * ph.real();
            f[2][o] = d.m0[a] * ph.imag();
            const cplx fr = ph * eb.probe_m(q, a);
            f[3][o] = fr.real();
            f[4][o] = fr.imag();
            const cplx g = cp * fr;
            f[5][o] = g.real();
            f[6][o] = g.imag();
        }
    };
    const double s = 1.0 / (2.0 * pi);
    const Term terms[] = {
        {&d.K, 0, 0, 2.0 / pi},
        {&d.K1, 1, 1, 1.0 / pi},
        {&d.K1, 2, 2, 1.0 / pi},
        {&d.Kpp_re, 3, 3, s},
        {&d.Kpp_re, 4, 4, s},
        {&d.Kpp_im, 4, 3, s},
        {&d.Kpp_im, 3, 4, -s},
        {&d.K3, 6, 3, 2.0 / pi},
        {&d.K3, 5, 4, 2.0 / pi},
    };
    accumulate(qs, w, P, P, 7, fill, terms, pool);

    d.K2 = Matrix(P, P);
    for (std::size_t i = 0; i < d.K2.a.size(); ++i) d.K2.a[i] = 2.0 * d.Kpp_re.a[i] - d.K1.a[i];

    if (!low) return d;

    // d/dr of e^{i(r-r')k} m(r,r';k): A(r) B(r') with
    // A1 = e^{irk}(ik m + dm), A0 = e^{irk}(ik m0 + dm0), B1 = e^{-ir'k} conj m, B0 = e^{-ir'k} m0.
    const FillFn dfill = [&](std::size_t q, std::size_t t, std::size_t ld, std::vector<std::vector<double>>& f) {
        const double k = kg.nodes[q];
        for (std::size_t a = 0; a < P; ++a) {
            const std::size_t o = a * ld + t;
            const cplx ph = std::polar(1.0, d.r[a] * k);
            const cplx m = eb.probe_m(q, a);
            const cplx a1 = ph * (cplx(0.0, k) * m + eb.probe_dm(q, a));
            const cplx a0 = ph * cplx(dm0[a], k * d.m0[a]);
            const cplx b1 = std::conj(ph * m);
            const cplx b0 = std::conj(ph) * d.m0[a];
            f[0][o] = a1.real();
            f[1][o] = a1.imag();
            f[2][o] = a0.real();
            f[3][o] = a0.imag();
            f[4][o] = b1.real();
            f[5][o] = b1.imag();
            f[6][o] = b0.real();
            f[7][o] = b0.imag();
        }
    };
    d.dK2 = Matrix(P, P);
    d.dKpp_im = Matrix(P, P);
    {
        const double c = 1.0 / pi;
        const Term t2[] = {{&d.dK2, 0, 4, c},        {&d.dK2, 1, 5, -c},       {&d.dK2, 2, 6, -c},
                           {&d.dK2, 3, 7, c},        {&d.dKpp_im, 0, 5, s},    {&d.dKpp_im, 1, 4, s},
                           {&d.dKpp_im, 2, 7, -s},   {&d.dKpp_im, 3, 6, -s}};
        accumulate(qs, w, P, P, 8, dfill, t2, pool);
    }

    const DyadicPartition fallback(lp_bump(), kg.j_min, kg.j_max);
    const DyadicPartition& part = partition ? *partition : fallback;
    for (int j = part.j_min(); j <= std::min(0, part.j_max()); ++j) {
        std::vector<std::size_t> qj;
        std::vector<std::vector<double>> wj(1);
        for (std::size_t t = 0; t < qs.size(); ++t) {
            const double b = part.block(j, kg.nodes[qs[t]]);
            if (b != 0.0) {
                qj.push_back(qs[t]);
                wj[0].push_back(w[0][t] * b);
            }
        }
        Matrix re(P, P), im(P, P);
        const Term tj[] = {{&re, 0, 4, s}, {&re, 1, 5, -s}, {&re, 2, 6, -s}, {&re, 3, 7, s},
                           {&im, 0, 5, s}, {&im, 1, 4, s},  {&im, 2, 7, -s}, {&im, 3, 6, -s}};
        if (!qj.empty()) accumulate(qj, wj, P, P, 8, dfill, tj, pool);
        Matrix mag(P, P);
        for (std::size_t i = 0; i < mag.a.size(); ++i) mag.a[i] = std::hypot(re.a[i], im.a[i]);
        d.block_j.push_back(j);
        d.block_dr.push_back(std::move(mag));
    }
    return d;
}

nlohmann::json KernelDecomposition::summary() const {
    const std::size_t P = r.size();
    double sum_err = 0.0, sym = 0.0;
    for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = 0; b < P; ++b) {
            sum_err = std::max(sum_err, std::abs(2.0 * Kpp_re(a, b) + K3(a, b) - K(a, b)));
            sym = std::max(sym, std::abs(K(a, b) - K(b, a)));
        }
    const double kmax = K.max_abs();
    return {{"support", to_string(support)},
            {"resonant", resonant},
            {"points", P},
            {"r_max", P ? r.back() : 0.0},
            {"spacing", spacing},
            {"max_abs",
             {{"K", kmax}, {"Kpp", Kpp_re.max_abs()}, {"K1", K1.max_abs()}, {"K2", K2.max_abs()}, {"K3", K3.max_abs()}}},
            {"piece_sum_relative_error", kmax > 0 ? sum_err / kmax : sum_err},
            {"symmetry_relative_error", kmax > 0 ? sym / kmax : sym},
            {"grouping", support == Support::high ? "K1 = (1/pi) int cos((r-r')k) mu; K2 = Kpp + Kmm - K1; K3 = Kpm + Kmp"
                                                  : "K1 = (1/pi) m(r,0) m(r',0) int cos((r-r')k) mu; K2 = Kpp + Kmm - K1 "
                                                    "(sum over j of K_j^(+,+) + K_j^(-,-)); K3 = Kpm + Kmp"}};
}

namespace {

bool admissible(double r, double rp, double h) { return std::abs(r - rp) >= 4.0 * h && r + rp >= 1.0; }

SlopeFit fit_envelope(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi,
                      std::size_t bins) {
    const Envelope env = log_binned_envelope(x, y, lo, hi, bins);
    const LineFit f = loglog_fit(env.x, env.y);
    return {f.slope, lo, hi, f.points};
}

nlohmann::json slope_json(const SlopeFit& s) {
    return {{"slope", s.slope}, {"lo", s.lo}, {"hi", s.hi}, {"points", s.points}};
}

}  // namespace

nlohmann::json HighEnergyReport::to_json() const {
    return {{"c2", c2}, {"c3", c3}, {"k2_max", k2_max}, {"k3_diagonal_slope", slope_json(k3_diagonal)},
            {"k2_offdiagonal_slope", slope_json(k2_offdiagonal)}};
}

HighEnergyReport verify_high_energy_bounds(const KernelDecomposition& d, double slope_lo, double slope_hi) {
    if (d.support != Support::high) throw std::invalid_argument("verify_high_energy_bounds: needs a high decomposition");
    HighEnergyReport rep;
    const std::size_t P = d.r.size();
    const double h = d.spacing;
    std::vector<double> dx, dy, sx, sy;
    for (std::size_t a = 0; a < P; ++a) {
        for (std::size_t b = 0; b < P; ++b) {
            const double r = d.r[a], rp = d.r[b];
            if (r + rp >= 1.0) rep.c3 = std::max(rep.c3, (r + rp) * std::abs(d.K3(a, b)));
            if (!admissible(r, rp, h)) continue;
            const double x = r - rp;
            rep.c2 = std::max(rep.c2, (1.0 + x * x) * std::abs(d.K2(a, b)));
            rep.k2_max = std::max(rep.k2_max, std::abs(d.K2(a, b)));
            if (b < a) {
                dx.push_back(std::abs(x));
                dy.push_back(std::abs(d.K2(a, b)));
            }
        }
        sx.push_back(2.0 * d.r[a]);
        sy.push_back(std::abs(d.K3(a, a)));
    }
    rep.k3_diagonal = fit_envelope(sx, sy, slope_lo, slope_hi, 12);
    rep.k2_offdiagonal = fit_envelope(dx, dy, 2.0, 50.0, 10);
    return rep;
}

nlohmann::json LowEnergyReport::to_json() const {
    return {{"c2", c2},
            {"c2r", c2r},
            {"dk2_slope", slope_json(dk2_slope)},
            {"dkpp_slope", slope_json(dkpp_slope)},
            {"block_uniform", block_uniform},
            {"block_j", block_j},
            {"block_constants", block_constants},
            {"block_constant", block_constant},
            {"block_spread", block_spread},
            {"k1_ratio", k1_ratio},
            {"fd_crosscheck", fd_crosscheck}};
}

LowEnergyReport verify_low_energy_bounds(const KernelDecomposition& d, double slope_lo, double slope_hi,
                                         std::uint64_t seed) {
    if (d.support != Support::low) throw std::invalid_argument("verify_low_energy_bounds: needs a low decomposition");
    LowEnergyReport rep;
    const std::size_t P = d.r.size();
    const double h = d.spacing;
    std::vector<double> dx, dy, dz;
    for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = 0; b < P; ++b) {
            const double r = d.r[a], rp = d.r[b];
            if (!admissible(r, rp, h)) continue;
            const double x = std::abs(r - rp);
            rep.c2 = std::max(rep.c2, x * std::abs(d.K2(a, b)));
            rep.c2r = std::max(rep.c2r, x * x * std::abs(d.dK2(a, b)));
            dx.push_back(x);
            dy.push_back(std::abs(d.dK2(a, b)));
            dz.push_back(std::hypot(0.5 * d.dK2(a, b), d.dKpp_im(a, b)));
        }
    rep.dk2_slope = fit_envelope(dx, dy, slope_lo, slope_hi, 10);
    rep.dkpp_slope = fit_envelope(dx, dz, slope_lo, slope_hi, 10);

    rep.block_j = d.block_j;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < d.block_j.size(); ++n) {
        const double two_j = std::ldexp(1.0, d.block_j[n]);
        double c = 0.0;
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = 0; b < P; ++b) {
                const double r = d.r[a], rp = d.r[b];
                if (!admissible(r, rp, h)) continue;
                const double x = std::abs(r - rp);
                const double env = std::min(two_j * two_j, 1.0 / (x * x * x * two_j));
                c = std::max(c, d.block_dr[n](a, b) / env);
            }
        rep.block_constants.push_back(c);
        rep.block_constant = std::max(rep.block_constant, c);
        lo = std::min(lo, c);
    }
    rep.block_spread = d.block_j.empty() || lo == 0.0 ? 0.0 : rep.block_constant / lo;
    if (rep.block_constants.size() > 3) {
        const auto mid = rep.block_constants.begin() + 3;
        rep.block_uniform = *std::max_element(rep.block_constants.begin(), mid) <=
                            *std::max_element(mid, rep.block_constants.end());
    }

    const double kmax = d.K.max_abs();
    rep.k1_ratio = kmax > 0 ? d.K1.max_abs() / kmax : 0.0;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(1, P - 2);
    const double dscale = 1e-2 * d.dK2.max_abs();
    int found = 0;
    for (int tries = 0; found < 20 && tries < 100000; ++tries) {
        const std::size_t a = pick(rng), b = pick(rng);
        if (!admissible(d.r[a], d.r[b], h) || std::abs(d.r[a] - d.r[b]) < 8.0 * h) continue;
        const double fd = (d.K2(a + 1, b) - d.K2(a - 1, b)) / (d.r[a + 1] - d.r[a - 1]);
        const double gap = std::abs(fd - d.dK2(a, b)) / std::max(std::abs(d.dK2(a, b)), dscale);
        rep.fd_crosscheck = std::max(rep.fd_crosscheck, gap);
        ++found;
    }
    return rep;
}

nlohmann::json HormanderReport::to_json() const { return {{"sup", sup}, {"pairs", pairs}}; }

HormanderReport hormander_scan(const KernelDecomposition& d, std::span<const std::pair<double, double>> pairs) {
    HormanderReport rep;
    const std::size_t P = d.r.size();
    if (P < 2) return rep;
    auto snap = [&](double x) {
        const auto it = std::lower_bound(d.r.begin(), d.r.end(), x);
        if (it == d.r.end()) return P - 1;
        const std::size_t i = it - d.r.begin();
        if (i > 0 && x - d.r[i - 1] < *it - x) return i - 1;
        return i;
    };
    for (const auto& [x1, x2] : pairs) {
        const std::size_t a1 = snap(x1), a2 = snap(x2);
        const double r1 = d.r[a1], gap = 2.0 * std::abs(r1 - d.r[a2]);
        double s = 0.0;
        for (std::size_t b = 0; b < P; ++b) {
            if (std::abs(d.r[b] - r1) <= gap) continue;
            const double wb = (b == 0 || b + 1 == P) ? 0.5 * d.spacing : d.spacing;
            s += wb * std::abs(d.K2(a1, b) - d.K2(a2, b));
        }
        rep.values.push_back(s);
        rep.sup = std::max(rep.sup, s);
    }
    rep.pairs = pairs.size();
    return rep;
}

std::vector<std::pair<double, double>> hormander_pairs(std::size_t count, double lo, double hi, double min_gap) {
    auto halton = [](std::size_t i, unsigned base) {
        double f = 1.0, r = 0.0;
        for (; i > 0; i /= base) {
            f /= base;
            r += f * double(i % base);
        }
        return r;
    };
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; out.size() < count && i < 100 * count + 100; ++i) {
        const double a = lo + (hi - lo) * halton(i, 2), b = lo + (hi - lo) * halton(i, 3);
        if (std::abs(a - b) >= min_gap) out.emplace_back(a, b);
    }
    return out;
}

nlohmann::json SmallnessReport::to_json() const { return {{"slope", slope}, {"samples", k.size()}}; }

SmallnessReport m_rr_smallness(const Eigenbasis& eb, double k_lo, double k_hi) {
    SmallnessReport rep;
    const auto& probes = eb.probe_indices();
    const std::size_t P = probes.size();
    if (P == 0) return rep;
    const JostColumn c0 = solve_m(eb.potential_samples(), eb.rgrid(), 0.0);
    std::vector<double> m0(P);
    for (std::size_t a = 0; a < P; ++a) m0[a] = c0.m[probes[a]].real();
    const auto& kg = eb.kgrid();
    for (std::size_t q = 0; q < kg.size() && kg.nodes[q] < 1.0; ++q) {
        double s = 0.0;
        for (std::size_t a = 0; a < P; ++a) {
            const cplx ma = eb.probe_m(q, a);
            for (std::size_t b = 0; b < P; ++b)
                s = std::max(s, std::abs(ma * std::conj(eb.probe_m(q, b)) - m0[a] * m0[b]));
        }
        rep.k.push_back(kg.nodes[q]);
        rep.sup.push_back(s);
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rep.k.size(); ++i)
        if (rep.k[i] >= k_lo && rep.k[i] <= k_hi) {
            x.push_back(rep.k[i]);
            y.push_back(rep.sup[i]);
        }
    rep.slope = loglog_fit(x, y).slope;
    return rep;
}

void write_kernel_csv(std::ostream& out, const KernelDecomposition& d, std::size_t stride,
                      const nlohmann::json& config) {
    out << "# config=" << config.dump() << '\n' << std::setprecision(17);
    out << "piece,r,r_prime,re_K,im_K\n";
    const std::size_t st = std::max<std::size_t>(1, stride);
    auto dump = [&](const char* name, const Matrix& m, const Matrix* im) {
        if (m.rows == 0) return;
        for (std::size_t a = 0; a < m.rows; a += st)
            for (std::size_t b = 0; b < m.cols; b += st)
                out << name << ',' << d.r[a] << ',' << d.r[b] << ',' << m(a, b) << ',' << (im ? (*im)(a, b) : 0.0)
                    << '\n';
    };
    dump("K", d.K, nullptr);
    dump("Kpp", d.Kpp_re, &d.Kpp_im);
    dump("K1", d.K1, nullptr);
    dump("K2", d.K2, nullptr);
    dump("K3", d.K3, nullptr);
    dump("dK2_dr", d.dK2, nullptr);
}

}  // namespace dftlab
