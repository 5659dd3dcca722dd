#include "dftlab/potentials/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dftlab/numerics/fit.hpp"
#include "dftlab/numerics/quadrature.hpp"

namespace dftlab {

PotentialModel::PotentialModel(std::string label, double beta, Fn value, Fn derivative, Fn tail_moment,
                               nlohmann::json description)
    : label_(std::move(label)),
      beta_(beta),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      tail_(std::move(tail_moment)),
      description_(std::move(description)) {}

PotentialModel PotentialModel::with_beta(double beta) const {
    PotentialModel p = *this;
    p.beta_ = beta;
    p.description_["beta"] = beta;
    return p;
}

PotentialModel PotentialModel::scaled(double s) const {
    PotentialModel p = *this;
    auto v = value_, d = derivative_, t = tail_;
    p.value_ = [v, s](double r) { return s * v(r); };
    p.derivative_ = [d, s](double r) { return s * d(r); };
    p.tail_ = [t, s](double r) { return std::abs(s) * t(r); };
    p.label_ = label_ + "*" + std::to_string(s);
    p.description_ = {{"scaled", s}, {"base", description_}};
    p.zero_ = zero_ || s == 0.0;
    return p;
}

std::vector<double> PotentialModel::sample(std::span<const double> r) const {
    std::vector<double> v(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = value_(r[i]);
    return v;
}

PotentialModel free_potential() {
    auto zero = [](double) { return 0.0; };
    PotentialModel p("free", std::numeric_limits<double>::infinity(), zero, zero, zero,
                     {{"name", "free"}});
    p.zero_ = true;
    return p;
}

double eval_phi(double r, double a) { return std::pow(3.0 * a, 0.25) / std::sqrt(1.0 + a * r * r); }

double eval_dphi_da(double r, double a) {
    const double q = 1.0 + a * r * r;
    return std::pow(3.0, 0.25) *
           (0.25 * std::pow(a, -0.75) / std::sqrt(q) - 0.5 * std::pow(a, 0.25) * r * r / (q * std::sqrt(q)));
}

PotentialModel aubin_potential(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("aubin potential: scale a must be positive");
    auto value = [a](double r) {
        const double q = 1.0 + a * r * r;
        return -15.0 * a / (q * q);
    };
    auto derivative = [a](double r) {
        const double q = 1.0 + a * r * r;
        return 60.0 * a * a * r / (q * q * q);
    };
    // int_R^inf r * 15a (1 + a r^2)^-2 dr = 15 / (2 (1 + a R^2))
    auto tail = [a](double r) { return 7.5 / (1.0 + a * r * r); };
    std::ostringstream label;
    label << "aubin(" << a << ")";
    return PotentialModel(label.str(), 4.0, value, derivative, tail, {{"name", "aubin"}, {"a", a}});
}

namespace {

struct Spline {
    std::vector<double> x, y, m;  // m: second derivatives

    double eval(double r, int deriv) const {
        if (r < x.front() || r > x.back()) return 0.0;
        auto it = std::upper_bound(x.begin(), x.end(), r);
        std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
        if (i + 1 >= x.size()) i = x.size() - 2;
        const double h = x[i + 1] - x[i];
        const double a = (x[i + 1] - r) / h, b = (r - x[i]) / h;
        if (deriv == 0)
            return a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
        return (y[i + 1] - y[i]) / h - (3.0 * a * a - 1.0) * h * m[i] / 6.0 +
               (3.0 * b * b - 1.0) * h * m[i + 1] / 6.0;
    }
};

Spline natural_spline(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    Spline s{std::move(x), std::move(y), std::vector<double>(n, 0.0)};
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (s.x[i] - s.x[i - 1]) / (s.x[i + 1] - s.x[i - 1]);
        const double p = sig * s.m[i - 1] + 2.0;
        s.m[i] = (sig - 1.0) / p;
        const double d = (s.y[i + 1] - s.y[i]) / (s.x[i + 1] - s.x[i]) -
                         (s.y[i] - s.y[i - 1]) / (s.x[i] - s.x[i - 1]);
        u[i] = (6.0 * d / (s.x[i + 1] - s.x[i - 1]) - sig * u[i - 1]) / p;
    }
    s.m[n - 1] = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) s.m[k] = s.m[k] * s.m[k + 1] + u[k];
    return s;
}

}  // namespace

PotentialModel parse_tabulated_potential(std::istream& in, const std::string& label) {
    std::string line;
    double beta = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rs, vs;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto pos = line.find("beta=");
            if (pos != std::string::npos) {
                try {
                    beta = std::stod(line.substr(pos + 5));
                } catch (const std::exception&) {
                    throw std::runtime_error(label + ":" + std::to_string(lineno) + ": malformed beta header");
                }
            }
            continue;
        }
        std::istringstream row(line);
        double r = 0, v = 0;
        std::string extra;
        if (!(row >> r >> v) || (row >> extra))
            throw std::runtime_error(label + ":" + std::to_string(lineno) + ": expected two numeric columns 'r V'");
        if (!rs.empty() && !(r > rs.back()))
            throw std::runtime_error(label + ":" + std::to_string(lineno) + ": r values must be strictly increasing");
        rs.push_back(r);
        vs.push_back(v);
    }
    if (rs.empty()) throw std::runtime_error(label + ": empty potential table");
    if (std::isnan(beta)) throw std::runtime_error(label + ": missing '# beta=<float>' header");
    if (rs.size() < 4)
        throw std::runtime_error(label + ": need at least 4 rows for cubic interpolation, got " +
                                 std::to_string(rs.size()));

    // Power-law fit to the outer tenth of the table for the tail moment.
    const std::size_t n = rs.size();
    const std::size_t from = n - std::max<std::size_t>(4, n / 10);
    std::vector<double> tx(rs.begin() + from, rs.end()), ty(vs.begin() + from, vs.end());
    double tail_c = 0.0, tail_sigma = -beta;
    bool any = std::any_of(ty.begin(), ty.end(), [](double v) { return v != 0.0; });
    if (any && tx.front() > 0) {
        const LineFit f = loglog_fit(tx, ty);
        if (f.points >= 2 && f.slope < -2.0) {
            tail_sigma = f.slope;
            tail_c = std::exp(f.intercept);
        }
    }
    auto spline = std::make_shared<Spline>(natural_spline(rs, vs));
    const double r_end = rs.back();
    auto value = [spline](double r) { return spline->eval(r, 0); };
    auto derivative = [spline](double r) { return spline->eval(r, 1); };
    auto tail = [spline, r_end, tail_c, tail_sigma](double R) {
        double s = 0.0;
        if (R < r_end) {
            const auto q = gauss_legendre(16);
            const std::size_t pieces = 64;
            const double w = (r_end - R) / pieces;
            for (std::size_t p = 0; p < pieces; ++p) {
                const double a = R + p * w;
                for (std::size_t i = 0; i < q.nodes.size(); ++i) {
                    const double r = a + 0.5 * w * (q.nodes[i] + 1.0);
                    s += 0.5 * w * q.weights[i] * r * std::abs(spline->eval(r, 0));
                }
            }
        }
        const double from_r = std::max(R, r_end);
        if (tail_c > 0) s += -tail_c * std::pow(from_r, tail_sigma + 2.0) / (tail_sigma + 2.0);
        return s;
    };
    return PotentialModel(label, beta, value, derivative, tail,
                          {{"name", "table"}, {"source", label}, {"beta", beta}, {"rows", n}});
}

PotentialModel load_tabulated_potential(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open potential table '" + path.string() + "'");
    return parse_tabulated_potential(in, path.string());
}

nlohmann::json DecayReport::to_json() const {
    return {{"C_V", c_v}, {"C_dV", c_dv}, {"growth_V", growth_v}, {"growth_dV", growth_dv}, {"pass", pass}};
}

DecayReport check_decay(const PotentialModel& p, const RadialGrid& grid) {
    DecayReport rep;
    const double beta = p.beta();
    std::vector<double> xs, qv, qd;
    for (double r : grid.nodes) {
        if (r < 1.0) continue;
        const double br = std::sqrt(1.0 + r * r);
        const double a = std::isfinite(beta) ? std::pow(br, beta) * std::abs(p(r)) : std::abs(p(r)) == 0 ? 0 : INFINITY;
        const double b = std::isfinite(beta) ? std::pow(br, beta + 1) * std::abs(p.derivative(r))
                                             : std::abs(p.derivative(r)) == 0 ? 0 : INFINITY;
        rep.c_v = std::max(rep.c_v, a);
        rep.c_dv = std::max(rep.c_dv, b);
        if (r >= 0.1 * grid.r_max) {
            xs.push_back(r);
            qv.push_back(a);
            qd.push_back(b);
        }
    }
    auto slope = [&](const std::vector<double>& q) {
        std::size_t positive = std::count_if(q.begin(), q.end(), [](double v) { return v > 0 && std::isfinite(v); });
        return positive >= 2 ? loglog_fit(xs, q).slope : 0.0;
    };
    rep.growth_v = slope(qv);
    rep.growth_dv = slope(qd);
    constexpr double kGrowthTolerance = 0.05;
    rep.pass = beta > 3.0 && std::isfinite(rep.c_v) && std::isfinite(rep.c_dv) &&
               rep.growth_v <= kGrowthTolerance && rep.growth_dv <= kGrowthTolerance;
    return rep;
}

}  // namespace dftlab
