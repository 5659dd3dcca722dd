#include "dftlab/lp/lp_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dftlab {

double lp_norm(std::span<const double> f, double p, const RadialGrid& grid, double s) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm: p must lie in (1, inf)");
    if (f.size() != grid.size()) throw std::invalid_argument("lp_norm: samples do not match the grid");
    const auto w = grid.transform_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        // r^(sp) is singular at r = 0 for sp < 0; Dirichlet data vanish there.
        if (f[i] == 0.0 || (grid.nodes[i] == 0.0 && s * p < 0.0)) continue;
        acc += w[i] * std::pow(grid.nodes[i], s * p) * std::pow(std::abs(f[i]), p);
    }
    return std::pow(acc, 1.0 / p);
}

double lp_norm_3d(std::span<const double> f, double p, const RadialGrid& grid) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm_3d: p must lie in (1, inf)");
    if (f.size() != grid.size()) throw std::invalid_argument("lp_norm_3d: samples do not match the grid");
    const auto w = grid.transform_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * grid.nodes[i] * grid.nodes[i] * std::pow(std::abs(f[i]), p);
    return std::pow(4.0 * std::numbers::pi * acc, 1.0 / p);
}

namespace {

struct PowerIntegral {
    double value = 0.0;
    bool divergent = false;
    bool logarithmic = false;
};

PowerIntegral power_integral(double sigma, double a, double b) {
    PowerIntegral out;
    out.logarithmic = sigma == -1.0;
    if (a == 0.0 && sigma <= -1.0) {
        out.divergent = true;
        out.value = std::numeric_limits<double>::infinity();
    } else if (sigma == -1.0) {
        out.value = std::log(b / a);
    } else {
        out.value = (std::pow(b, sigma + 1.0) - std::pow(a, sigma + 1.0)) / (sigma + 1.0);
    }
    return out;
}

}  // namespace

ApRatio ap_ratio(double s, double p, double a, double b) {
    if (!(p > 1.0)) throw std::invalid_argument("ap_ratio: p must exceed 1");
    if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("ap_ratio: need 0 <= a < b");
    const PowerIntegral i1 = power_integral(s, a, b), i2 = power_integral(-s / (p - 1.0), a, b);
    ApRatio r;
    r.divergent = i1.divergent || i2.divergent;
    r.logarithmic = i1.logarithmic || i2.logarithmic;
    r.value = r.divergent ? std::numeric_limits<double>::infinity()
                          : (i1.value / (b - a)) * std::pow(i2.value / (b - a), p - 1.0);
    return r;
}

std::vector<std::pair<double, double>> ap_family() {
    std::vector<std::pair<double, double>> fam;
    for (int e = -4; e <= 4; ++e) fam.emplace_back(0.0, std::pow(10.0, 0.5 * e));
    for (int e = -2; e <= 2; ++e)
        for (double delta : {0.1, 1.0, 10.0}) {
            const double a = std::pow(10.0, e);
            fam.emplace_back(a, a * (1.0 + delta));
        }
    return fam;
}

nlohmann::json ApScan::to_json() const {
    return {{"p", p},
            {"s", s},
            {"sup", divergent ? nlohmann::json("inf") : nlohmann::json(sup)},
            {"divergent", divergent},
            {"logarithmic", logarithmic},
            {"intervals", intervals},
            {"classification", classification()}};
}

ApScan ap_scan(double p, std::span<const std::pair<double, double>> family) {
    ApScan scan;
    scan.p = p;
    scan.s = 2.0 - p;
    for (const auto& [a, b] : family) {
        const ApRatio r = ap_ratio(scan.s, p, a, b);
        scan.divergent = scan.divergent || r.divergent;
        scan.logarithmic = scan.logarithmic || r.logarithmic;
        if (!r.divergent) scan.sup = std::max(scan.sup, r.value);
    }
    scan.intervals = family.size();
    return scan;
}

ApScan ap_scan(double p) {
    const auto fam = ap_family();
    return ap_scan(p, fam);
}

void TestFamily::add(std::string id, std::vector<double> f) {
    if (nr == 0) nr = f.size();
    if (f.size() != nr) throw std::invalid_argument("TestFamily: member size mismatch");
    ids.push_back(std::move(id));
    data.insert(data.end(), f.begin(), f.end());
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

TestFamily build_test_family(const RadialGrid& grid, std::uint64_t seed, const BoundStateSet* bound) {
    TestFamily fam;
    fam.nr = grid.size();
    const auto& r = grid.nodes;
    const double R = grid.r_max;
    auto gaussian = [&](double c, double w, double freq) {
        std::vector<double> f(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double t = (r[i] - c) / w;
            f[i] = std::exp(-t * t) * (freq > 0 ? std::sin(freq * (r[i] - c)) : 1.0);
        }
        return f;
    };
    for (int i = 1; std::ldexp(1.0, i) <= R / 4.0; ++i) {
        const double c = std::ldexp(1.0, i);
        fam.add("bump:c=" + fmt(c), gaussian(c, c / 4.0, 0.0));
    }
    for (int j = -2; j <= 4; ++j) {
        const double k = std::ldexp(1.0, j);
        fam.add("packet:k=" + fmt(k), gaussian(16.0, 4.0, k));
    }
    for (double frac : {0.5, 0.7, 0.85}) fam.add("far:c=" + fmt(frac * R), gaussian(frac * R, 1.0, 0.0));

    const std::size_t base = fam.size();
    std::mt19937_64 rng(seed);
    for (int m = 0; m < 32; ++m) {
        std::vector<double> f(r.size(), 0.0);
        for (int t = 0; t < 3; ++t) {
            const std::size_t pick = std::min<std::size_t>(base - 1, std::size_t(unit_uniform(rng) * double(base)));
            const double c = 2.0 * unit_uniform(rng) - 1.0;
            const auto g = fam.member(pick);
            for (std::size_t i = 0; i < f.size(); ++i) f[i] += c * g[i];
        }
        fam.add("mix:" + std::to_string(m), std::move(f));
    }
    if (bound && !bound->empty()) {
        const auto w = grid.transform_weights();
        for (std::size_t m = 0; m < fam.size(); ++m) {
            const auto p = project_continuous(*bound, fam.member(m), w);
            std::copy(p.begin(), p.end(), fam.data.begin() + m * fam.nr);
        }
    }
    return fam;
}

nlohmann::json OpnormEstimate::to_json() const {
    return {{"bound", bound}, {"maximizer_id", maximizer}, {"members", members}};
}

OpnormEstimate estimate_opnorm(std::span<const double> outputs, double p, double s, const TestFamily& family,
                               const RadialGrid& grid) {
    if (family.size() == 0) throw std::invalid_argument("estimate_opnorm: empty family");
    if (outputs.size() != family.data.size()) throw std::invalid_argument("estimate_opnorm: outputs do not match");
    OpnormEstimate est;
    est.members = family.size();
    for (std::size_t m = 0; m < family.size(); ++m) {
        const double den = lp_norm(family.member(m), p, grid, s);
        if (!(den > 0.0)) throw std::invalid_argument("estimate_opnorm: member " + family.ids[m] + " has zero norm");
        const double ratio = lp_norm(outputs.subspan(m * family.nr, family.nr), p, grid, s) / den;
        if (ratio > est.bound || m == 0) {
            est.bound = ratio;
            est.maximizer = family.ids[m];
            est.index = m;
        }
    }
    return est;
}

OpnormEstimate estimate_opnorm(const BatchOperator& T, double p, double s, const TestFamily& family,
                               const RadialGrid& grid) {
    const auto out = T(family.data, family.size());
    return estimate_opnorm(out, p, s, family, grid);
}

std::vector<double> duality_member(std::span<const double> u, double q, const RadialGrid& grid) {
    if (!(q > 1.0)) throw std::invalid_argument("duality_member: q must exceed 1");
    if (u.size() != grid.size()) throw std::invalid_argument("duality_member: samples do not match the grid");
    std::vector<double> g(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = grid.nodes[i];
        if (u[i] == 0.0 || r == 0.0) continue;
        g[i] = std::pow(r, 2.0 - q) * std::pow(std::abs(u[i]), q - 1.0) * (u[i] > 0 ? 1.0 : -1.0);
    }
    return g;
}

SquareFunctionResult square_function(const Eigenbasis& eb, const BoundStateSet& bound,
                                     const DyadicPartition& partition, std::span<const double> f,
                                     const WorkerPool* pool) {
    const auto& kg = eb.kgrid();
    if (partition.j_min() < kg.j_min || partition.j_max() > kg.j_max)
        throw std::invalid_argument("square_function: j range outside the spectral window");
    const std::size_t nr = eb.nr(), nk = eb.nk();
    const auto fc = project_continuous(bound, f, eb.rgrid().transform_weights());
    const auto F = forward_real(eb, fc, 1, pool);
    SquareFunctionResult res;
    res.nr = nr;
    for (int j = partition.j_min(); j <= partition.j_max(); ++j) res.j.push_back(j);
    std::vector<double> y(res.j.size() * nk);
    for (std::size_t b = 0; b < res.j.size(); ++b)
        for (std::size_t q = 0; q < nk; ++q) y[b * nk + q] = partition.block(res.j[b], kg.nodes[q]) * F[q];
    res.blocks = inverse_real(eb, y, res.j.size(), pool);
    res.sf.assign(nr, 0.0);
    for (std::size_t b = 0; b < res.j.size(); ++b)
        for (std::size_t i = 0; i < nr; ++i) res.sf[i] += res.blocks[b * nr + i] * res.blocks[b * nr + i];
    for (double& x : res.sf) x = std::sqrt(x);
    return res;
}

std::vector<int> random_signs(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> s(count);
    for (auto& x : s) x = (rng() >> 63) ? 1 : -1;
    return s;
}

const WindowClass* WindowExperiment::find(double p) const {
    for (const auto& c : classes)
        if (std::abs(c.p - p) < 1e-12) return &c;
    return nullptr;
}

nlohmann::json WindowExperiment::to_json() const {
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& row : rows) {
        std::string cls;
        if (const auto* c = find(row.p)) cls = c->classification;
        rj.push_back({{"p", row.p},
                      {"level", row.level},
                      {"bound", row.bound},
                      {"maximizer_id", row.maximizer_id},
                      {"pattern", row.pattern},
                      {"classification", cls}});
    }
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : classes) cj.push_back({{"p", c.p}, {"growth", c.growth}, {"classification", c.classification}});
    return {{"potential", potential}, {"rows", rj}, {"classes", cj}};
}

void WindowExperiment::write_csv(std::ostream& out, const nlohmann::json& config) const {
    out << "# config=" << config.dump() << '\n' << std::setprecision(17);
    out << "p,level,bound,maximizer_id,pattern,classification\n";
    for (const auto& row : rows) {
        const auto* c = find(row.p);
        out << row.p << ',' << row.level << ',' << row.bound << ',' << row.maximizer_id << ',' << row.pattern << ','
            << (c ? c->classification : "") << '\n';
    }
}

WindowExperiment lp_window_experiment(const PotentialModel& potential, const WindowOptions& options,
                                      const WorkerPool* pool) {
    if (options.levels.size() < 2) throw std::invalid_argument("lp_window_experiment: need at least two levels");
    if (options.patterns == 0) throw std::invalid_argument("lp_window_experiment: need at least one sign pattern");
    WindowExperiment ex;
    ex.potential = potential.label();
    const DyadicPartition part(lp_bump(), options.j_min, options.j_max);
    const std::size_t nb = std::size_t(options.j_max - options.j_min + 1);
    std::vector<std::vector<int>> signs;
    for (std::size_t t = 0; t < options.patterns; ++t) signs.push_back(random_signs(nb, options.seed * 7919 + t));

    for (double level : options.levels) {
        const auto n = std::size_t(std::lround(level * options.density));
        const RadialGrid rg = build_radial_grid(level, n);
        const SpectralGrid kg = build_spectral_grid(options.j_min, options.j_max, level);
        const Eigenbasis eb = build_eigenbasis(potential, rg, kg, {}, pool);
        const BoundStateSet bound = find_bound_states(potential, rg);
        const TestFamily fam = build_test_family(rg, options.seed, &bound);
        const std::size_t m = fam.size(), nk = kg.size(), nr = rg.size();
        const auto F = forward_real(eb, fam.data, m, pool);
        std::vector<double> y(options.patterns * m * nk);
        for (std::size_t t = 0; t < options.patterns; ++t) {
            const auto mu = random_sign_lp(part, signs[t]).sample(kg.nodes);
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t q = 0; q < nk; ++q) y[(t * m + c) * nk + q] = mu[q] * F[c * nk + q];
        }
        const auto x = inverse_real(eb, y, options.patterns * m, pool);
        auto outputs = [&](std::size_t t) { return std::span<const double>(x).subspan(t * m * nr, m * nr); };

        const std::size_t np = options.ps.size(), nd = options.dual_members ? np * options.patterns : 0;
        std::vector<double> dual_in(nd * nr), dual_out;
        std::vector<std::string> dual_id(nd);
        if (nd > 0) {
            for (std::size_t a = 0; a < np; ++a) {
                const double q = options.ps[a] / (options.ps[a] - 1.0);
                for (std::size_t t = 0; t < options.patterns; ++t) {
                    const auto est = estimate_opnorm(outputs(t), q, 2.0 / q - 1.0, fam, rg);
                    const auto g = duality_member(outputs(t).subspan(est.index * nr, nr), q, rg);
                    std::copy(g.begin(), g.end(), dual_in.begin() + (a * options.patterns + t) * nr);
                    dual_id[a * options.patterns + t] = "dual:" + est.maximizer;
                }
            }
            const auto G = forward_real(eb, dual_in, nd, pool);
            std::vector<double> yd(nd * nk);
            for (std::size_t t = 0; t < options.patterns; ++t) {
                const auto mu = random_sign_lp(part, signs[t]).sample(kg.nodes);
                for (std::size_t a = 0; a < np; ++a) {
                    const std::size_t c = a * options.patterns + t;
                    for (std::size_t q = 0; q < nk; ++q) yd[c * nk + q] = mu[q] * G[c * nk + q];
                }
            }
            dual_out = inverse_real(eb, yd, nd, pool);
        }

        for (std::size_t a = 0; a < np; ++a) {
            const double p = options.ps[a], s = 2.0 / p - 1.0;
            WindowRow row;
            row.p = p;
            row.level = level;
            for (std::size_t t = 0; t < options.patterns; ++t) {
                const auto est = estimate_opnorm(outputs(t), p, s, fam, rg);
                if (est.bound > row.bound) {
                    row.bound = est.bound;
                    row.maximizer_id = est.maximizer;
                    row.pattern = t;
                }
                if (nd == 0) continue;
                const std::size_t c = a * options.patterns + t;
                const std::span<const double> gin(dual_in.data() + c * nr, nr), gout(dual_out.data() + c * nr, nr);
                const double den = lp_norm(gin, p, rg, s);
                const double ratio = den > 0 ? lp_norm(gout, p, rg, s) / den : 0.0;
                if (ratio > row.bound) {
                    row.bound = ratio;
                    row.maximizer_id = dual_id[c];
                    row.pattern = t;
                }
            }
            ex.rows.push_back(row);
        }
    }
    for (double p : options.ps) {
        double first = 0.0, last = 0.0;
        for (const auto& row : ex.rows) {
            if (row.p != p) continue;
            if (row.level == options.levels.front()) first = row.bound;
            if (row.level == options.levels.back()) last = row.bound;
        }
        WindowClass c;
        c.p = p;
        c.growth = first > 0 ? last / first : 0.0;
        c.classification = c.growth > options.growth_threshold ? "growing" : "stable";
        ex.classes.push_back(c);
    }
    return ex;
}

}  // namespace dftlab
