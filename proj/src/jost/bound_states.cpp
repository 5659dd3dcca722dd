#include "dftlab/jost/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dftlab {

namespace {

constexpr double kRescale = 1e150;

/// One step of u'' = q u from (i-1, i) to i+1.
double step(const RadialGrid& g, const std::vector<double>& q, std::size_t i, double um, double u0, bool numerov,
            std::ptrdiff_t dir) {
    const std::size_t ip = i + dir, im = i - dir;
    if (numerov) {
        const double h2 = g.spacing() * g.spacing() / 12.0;
        return (2.0 * u0 * (1.0 + 5.0 * h2 * q[i]) - um * (1.0 - h2 * q[im])) / (1.0 - h2 * q[ip]);
    }
    const double hp = std::abs(g.nodes[ip] - g.nodes[i]), hm = std::abs(g.nodes[i] - g.nodes[im]);
    return u0 + hp * ((u0 - um) / hm + 0.5 * (hp + hm) * q[i] * u0);
}

std::vector<double> shifted(const std::vector<double>& v, double e) {
    std::vector<double> q(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i] - e;
    return q;
}

}  // namespace

std::size_t count_states_below(const std::vector<double>& v, const RadialGrid& grid, double energy) {
    const auto q = shifted(v, energy);
    const bool numerov = grid.is_uniform();
    const std::size_t n = grid.size();
    double um = 0.0, u0 = grid.nodes[1];
    std::size_t changes = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double up = step(grid, q, i, um, u0, numerov, 1);
        if ((up < 0) != (u0 < 0) && up != 0.0) ++changes;
        um = u0;
        u0 = up;
        if (std::abs(u0) > kRescale) {
            um /= kRescale;
            u0 /= kRescale;
        }
    }
    return changes;
}

namespace {

std::vector<double> eigenfunction(const std::vector<double>& v, const RadialGrid& grid, double energy) {
    const auto q = shifted(v, energy);
    const bool numerov = grid.is_uniform();
    const std::size_t n = grid.size();
    std::size_t turn = 1;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (q[i] < 0) turn = i;
    const std::size_t match = std::clamp<std::size_t>(turn + 1, 2, n - 3);
    std::vector<double> u(n, 0.0);
    u[1] = grid.nodes[1];
    for (std::size_t i = 1; i < match; ++i) {
        u[i + 1] = step(grid, q, i, u[i - 1], u[i], numerov, 1);
        if (std::abs(u[i + 1]) > kRescale)
            for (std::size_t j = 0; j <= i + 1; ++j) u[j] /= kRescale;
    }
    std::vector<double> w(n, 0.0);
    w[n - 2] = 1.0;
    for (std::size_t i = n - 2; i > match; --i) {
        w[i - 1] = step(grid, q, i, w[i + 1], w[i], numerov, -1);
        if (std::abs(w[i - 1]) > kRescale)
            for (std::size_t j = i - 1; j < n; ++j) w[j] /= kRescale;
    }
    if (w[match] == 0.0 || u[match] == 0.0) throw std::runtime_error("bound state matching failed");
    const double scale = u[match] / w[match];
    for (std::size_t i = match + 1; i < n; ++i) u[i] = scale * w[i];
    return u;
}

double inner(const std::vector<double>& a, const std::vector<double>& b, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

}  // namespace

BoundStateSet find_bound_states(const PotentialModel& p, const RadialGrid& grid) {
    BoundStateSet set;
    if (p.is_zero()) return set;
    const auto v = p.sample(grid.nodes);
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    const double lo = -2.0 * vmax, hi = -1e-6;
    if (!(lo < hi)) return set;
    constexpr int kSubdivisions = 64;
    std::vector<double> es(kSubdivisions + 1);
    std::vector<std::size_t> counts(kSubdivisions + 1);
    for (int s = 0; s <= kSubdivisions; ++s) {
        es[s] = lo + (hi - lo) * s / kSubdivisions;
        counts[s] = count_states_below(v, grid, es[s]);
    }
    for (int s = 0; s < kSubdivisions; ++s) {
        for (std::size_t idx = counts[s]; idx < counts[s + 1]; ++idx) {
            double a = es[s], b = es[s + 1];
            int it = 0;
            for (; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
                const double mid = 0.5 * (a + b);
                (count_states_below(v, grid, mid) > idx ? b : a) = mid;
            }
            if (b - a > 1e-13 * std::max(1.0, std::abs(a)))
                throw std::runtime_error("bound state bisection did not converge after 100 iterations");
            set.states.push_back(BoundState{0.5 * (a + b), eigenfunction(v, grid, 0.5 * (a + b))});
        }
    }
    const auto w = grid.transform_weights();
    for (std::size_t a = 0; a < set.states.size(); ++a) {
        auto& u = set.states[a].u;
        for (std::size_t b = 0; b < a; ++b) {
            const double c = inner(u, set.states[b].u, w);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] -= c * set.states[b].u[i];
        }
        const double nrm = std::sqrt(inner(u, u, w));
        double sign = 1.0;
        for (double x : u)
            if (std::abs(x) > 1e-3 * nrm) {
                sign = x > 0 ? 1.0 : -1.0;
                break;
            }
        for (double& x : u) x *= sign / nrm;
    }
    return set;
}

nlohmann::json BoundStateSet::summary() const {
    nlohmann::json e = nlohmann::json::array();
    for (const auto& s : states) e.push_back(s.energy);
    return {{"count", states.size()}, {"energies", e}};
}

}  // namespace dftlab
