#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dftlab/io/config.hpp"
#include "dftlab/jost/bound_states.hpp"
#include "dftlab/jost/jost.hpp"
#include "dftlab/lp/lp_analysis.hpp"
#include "dftlab/multiplier/multiplier.hpp"
#include "dftlab/numerics/parallel.hpp"
#include "dftlab/spectral/spectral.hpp"
#include "dftlab/verify/verify.hpp"

using namespace dftlab;
namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out, potential, table, suite, multiplier, input, grading;
    std::optional<double> a, scale, rmax;
    std::optional<std::size_t> n;
    std::optional<int> j_min, j_max;
    std::vector<double> ps;
    std::vector<int> only;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file (flags override its values)");
    sub->add_option("--seed", f.seed, "seed for all randomization");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--potential", f.potential, "free | aubin | table");
    sub->add_option("--a", f.a, "aubin parameter a");
    sub->add_option("--scale", f.scale, "potential scale factor");
    sub->add_option("--table", f.table, "tabulated potential file");
    sub->add_option("--rmax", f.rmax, "radial cutoff r_max");
    sub->add_option("--n", f.n, "radial nodes");
    sub->add_option("--jmin", f.j_min, "lowest dyadic block");
    sub->add_option("--jmax", f.j_max, "highest dyadic block");
    sub->add_option("--grading", f.grading, "uniform | graded");
    sub->add_option("--p", f.ps, "exponents p");
    sub->add_option("--multiplier", f.multiplier, "high_pass | low_pass | constant | sin_log | block:<j>");
    sub->add_option("--threads", f.threads, "worker threads (0: hardware)");
}

RunConfig resolve(const Flags& f, const std::string& experiment) {
    RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
    c.experiment = experiment;
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out = *f.out;
    if (f.potential) {
        if (*f.potential != c.potential.name) c.potential = PotentialSpec{*f.potential, std::nullopt, 1.0, {}};
    }
    if (f.a) c.potential.a = *f.a;
    if (f.scale) c.potential.scale = *f.scale;
    if (f.table) c.potential.table = *f.table;
    if (f.rmax) c.r_max = *f.rmax;
    if (f.n) c.n = *f.n;
    if (f.j_min) c.j_min = *f.j_min;
    if (f.j_max) c.j_max = *f.j_max;
    if (f.grading) c.grading = *f.grading;
    if (!f.ps.empty()) c.ps = f.ps;
    if (f.multiplier) c.multiplier = *f.multiplier;
    if (f.suite) c.suite = *f.suite;
    if (f.input) c.input = *f.input;
    c.validate();
    return c;
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(c.out) / name).string());
    f << std::setprecision(17);
    return f;
}

void report(const RunConfig& c, const std::string& name, const nlohmann::json& j) {
    write_json_report(fs::path(c.out) / name, j, c);
    std::cout << "wrote " << (fs::path(c.out) / name).string() << '\n';
}

int cmd_jost(const RunConfig& c, const WorkerPool& pool) {
    const PotentialModel p = c.make_potential();
    const RadialGrid g = c.make_radial_grid();
    const SpectralGrid kg = c.make_spectral_grid();

    std::vector<double> ks;
    for (std::size_t q = 0; q < kg.size(); q += 16) ks.push_back(kg.nodes[q]);
    const auto table = build_jost_table(p, g, ks, std::max<std::size_t>(1, g.size() / 128), false, &pool);
    {
        auto f = open_out(c, "jost_table.csv");
        write_jost_csv(f, table, c.to_json());
    }
    const auto sc = scattering_at_origin(p, g, kg.nodes, &pool);
    {
        auto f = open_out(c, "scattering.csv");
        f << "# config=" << c.to_json().dump() << '\n' << "k,re_f0,im_f0,wronskian_defect\n";
        for (std::size_t q = 0; q < sc.k.size(); ++q)
            f << sc.k[q] << ',' << sc.f0[q].real() << ',' << sc.f0[q].imag() << ',' << sc.wronskian_defect[q] << '\n';
    }
    const auto res = detect_resonance(p, g);
    report(c, "resonance.json", {{"resonance", res.to_json()}, {"scattering", sc.summary()},
                                 {"truncation_error", truncation_error(p, g)}});
    std::cout << "resonant: " << (res.resonant ? "true" : "false") << "  |f(0,0)| = " << res.magnitude << '\n';
    return 0;
}

std::vector<double> read_input(const RunConfig& c, const RadialGrid& g, const BoundStateSet& bs) {
    const std::string& in = c.input;
    std::vector<double> f(g.size(), 0.0);
    if (in.empty() || in == "gaussian") {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.nodes[i] * std::exp(-g.nodes[i] * g.nodes[i] / 4.0);
        return f;
    }
    if (in == "zero") return f;
    if (in.rfind("bound:", 0) == 0) {
        const std::size_t b = std::stoul(in.substr(6));
        if (b >= bs.size()) throw std::invalid_argument("input " + in + ": only " + std::to_string(bs.size()) + " bound states");
        return bs.states[b].u;
    }
    std::ifstream file(in);
    if (!file) throw std::invalid_argument("cannot open input " + in);
    std::vector<double> r, v;
    std::string line;
    while (std::getline(file, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ss(line);
        std::vector<double> cols;
        double x;
        while (ss >> x) cols.push_back(x);
        if (cols.empty()) continue;  // header
        if (cols.size() == 1) v.push_back(cols[0]);
        else {
            r.push_back(cols[0]);
            v.push_back(cols[1]);
        }
    }
    if (v.size() != g.size())
        throw std::invalid_argument("grid mismatch: input has " + std::to_string(v.size()) + " samples, grid has " +
                                    std::to_string(g.size()));
    for (std::size_t i = 0; i < r.size(); ++i)
        if (std::abs(r[i] - g.nodes[i]) > 1e-9 * g.r_max)
            throw std::invalid_argument("grid mismatch: input node " + std::to_string(i) + " at r=" +
                                        std::to_string(r[i]) + ", grid has " + std::to_string(g.nodes[i]));
    return v;
}

int cmd_transform(const RunConfig& c, const WorkerPool& pool) {
    const PotentialModel p = c.make_potential();
    const RadialGrid g = c.make_radial_grid();
    const Eigenbasis eb = build_eigenbasis(p, g, c.make_spectral_grid(), {}, &pool);
    const BoundStateSet bs = find_bound_states(p, g);
    const auto f = read_input(c, g, bs);
    const auto w = g.transform_weights();
    const auto F = forward_transform(eb, bs, f, &pool);
    {
        auto out = open_out(c, "coefficients.csv");
        write_coefficients_csv(out, F, c.to_json());
    }
    const auto back = inverse_transform(eb, F, &pool);
    const auto pc = project_continuous(bs, f, w);
    const double norm = l2_norm(f, w);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err += w[i] * (back[i] - pc[i]) * (back[i] - pc[i]);
    err = norm > 0.0 ? std::sqrt(err) / norm : std::sqrt(err);
    const double energy = F.continuous_energy(eb.kgrid().weights);
    const double fraction = norm > 0.0 ? energy / (norm * norm) : 0.0;
    report(c, "transform.json", {{"roundtrip_error", err},
                                 {"continuous_energy_fraction", fraction},
                                 {"l2_norm", norm},
                                 {"bound_components", F.bound_components},
                                 {"bound_states", bs.summary()},
                                 {"truncation_warning", F.truncation_warning}});
    std::cout << "round-trip error " << err << ", continuous energy fraction " << fraction << '\n';
    return 0;
}

int cmd_kernel(const RunConfig& c, const WorkerPool& pool) {
    const PotentialModel p = c.make_potential();
    const RadialGrid g = c.make_radial_grid();
    const Multiplier mu = c.make_multiplier();
    if (mu.support() == Support::full)
        throw ConfigError("kernel: multiplier must be high_pass or low_pass (support restricted)");
    EigenbasisOptions eo;
    eo.probe_indices = kernel_indices(g, std::min(c.kernel_r_max, c.r_max), c.kernel_stride);
    const Eigenbasis eb = build_eigenbasis(p, g, c.make_spectral_grid(), eo, &pool);
    const DyadicPartition part(lp_bump(), c.j_min, 0);
    const auto d = decompose_kernel(eb, mu, &part, &pool);
    {
        auto out = open_out(c, "kernel.csv");
        write_kernel_csv(out, d, 1, c.to_json());
    }
    nlohmann::json j = {{"decomposition", d.summary()},
                        {"mikhlin", check_mikhlin(mu, mikhlin_samples(-12, 8)).to_json()}};
    if (mu.support() == Support::high) {
        j["high_energy"] = verify_high_energy_bounds(d).to_json();
    } else {
        j["low_energy"] = verify_low_energy_bounds(d, 10.0, 100.0, c.seed).to_json();
        j["hormander"] = hormander_scan(d, hormander_pairs(50, 1.0, std::min(100.0, c.kernel_r_max), 0.5)).to_json();
        j["m_smallness"] = m_rr_smallness(eb).to_json();
    }
    report(c, "kernel_fits.json", j);
    return 0;
}

int cmd_sqfn(const RunConfig& c, const WorkerPool& pool) {
    const PotentialModel p = c.make_potential();
    const RadialGrid g = c.make_radial_grid();
    const Eigenbasis eb = build_eigenbasis(p, g, c.make_spectral_grid(), {}, &pool);
    const BoundStateSet bs = find_bound_states(p, g);
    const DyadicPartition part(lp_bump(), c.j_min, c.j_max);
    const TestFamily fam = build_test_family(g, c.seed, &bs);
    const auto w = g.transform_weights();

    auto out = open_out(c, "sqfn.csv");
    out << "# config=" << c.to_json().dump() << '\n' << "member,l2_ratio";
    for (double q : c.ps) out << ",lp_ratio_p" << q;
    out << '\n';
    double lo = 1e300, hi = 0.0;
    std::vector<double> plo(c.ps.size(), 1e300), phi(c.ps.size(), 0.0);
    for (std::size_t m = 0; m < fam.size(); ++m) {
        const auto f = fam.member(m);
        const auto sq = square_function(eb, bs, part, f, &pool);
        const double r2 = l2_norm(sq.sf, w) / l2_norm(f, w);
        lo = std::min(lo, r2);
        hi = std::max(hi, r2);
        out << fam.ids[m] << ',' << r2;
        for (std::size_t a = 0; a < c.ps.size(); ++a) {
            const double s = 2.0 / c.ps[a] - 1.0;
            const double rp = lp_norm(sq.sf, c.ps[a], g, s) / lp_norm(f, c.ps[a], g, s);
            plo[a] = std::min(plo[a], rp);
            phi[a] = std::max(phi[a], rp);
            out << ',' << rp;
        }
        out << '\n';
    }
    nlohmann::json per_p = nlohmann::json::array();
    for (std::size_t a = 0; a < c.ps.size(); ++a) per_p.push_back({{"p", c.ps[a]}, {"min", plo[a]}, {"max", phi[a]}});
    report(c, "sqfn.json", {{"members", fam.size()}, {"l2_ratio", {{"min", lo}, {"max", hi}}}, {"lp_ratio", per_p}});
    std::cout << "L2 ratio range [" << lo << ", " << hi << "]\n";
    return 0;
}

int cmd_apscan(const RunConfig& c) {
    auto out = open_out(c, "apscan.csv");
    out << "# config=" << c.to_json().dump() << '\n' << "p,s,sup,classification,logarithmic,intervals\n";
    nlohmann::json arr = nlohmann::json::array();
    for (double p : c.ps) {
        const auto s = ap_scan(p);
        out << s.p << ',' << s.s << ',' << s.sup << ',' << s.classification() << ',' << s.logarithmic << ','
            << s.intervals << '\n';
        arr.push_back(s.to_json());
        std::cout << "p=" << p << "  s=" << s.s << "  " << s.classification();
        if (!s.divergent) std::cout << "  sup=" << s.sup;
        std::cout << '\n';
    }
    report(c, "apscan.json", {{"scans", arr}});
    return 0;
}

int cmd_window(const RunConfig& c, const WorkerPool& pool) {
    WindowOptions wo;
    wo.ps = c.ps;
    wo.levels = {c.r_max / 4, c.r_max / 2, c.r_max};
    wo.density = double(c.n) / c.r_max;
    wo.j_min = c.j_min;
    wo.j_max = c.j_max;
    wo.seed = c.seed;
    const auto ex = lp_window_experiment(c.make_potential(), wo, &pool);
    {
        auto out = open_out(c, "window.csv");
        ex.write_csv(out, c.to_json());
    }
    report(c, "window.json", ex.to_json());
    for (const auto& cl : ex.classes) std::cout << "p=" << cl.p << "  growth=" << cl.growth << "  " << cl.classification << '\n';
    return 0;
}

int cmd_verify(const RunConfig& c, const std::vector<int>& only, const WorkerPool& pool) {
    VerifyOptions vo;
    vo.config = c;
    vo.only.insert(only.begin(), only.end());
    vo.pool = &pool;
    vo.on_result = [](const CriterionResult& r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << std::endl;
    };
    const auto rep = run_verification(vo);
    report(c, "verify.json", rep.to_json());
    if (rep.all_pass()) return 0;
    std::cerr << "failing criteria:";
    for (const auto& r : rep.results)
        if (!r.pass) std::cerr << ' ' << r.id << " (" << r.title << ')';
    std::cerr << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dftlab: distorted Fourier transform and multiplier experiments"};
    app.require_subcommand(1);
    Flags f;
    auto* jost = app.add_subcommand("jost", "Jost solutions, f(0,k) and resonance report");
    auto* transform = app.add_subcommand("transform", "distorted Fourier coefficients of an input profile");
    auto* kernel = app.add_subcommand("kernel", "kernel decomposition of a high- or low-pass multiplier");
    auto* sqfn = app.add_subcommand("sqfn", "square-function ratios over the test family");
    auto* apscan = app.add_subcommand("apscan", "A_p bracket scan for w = r^(2-p)");
    auto* window = app.add_subcommand("window", "multiplier-norm growth across r_max levels");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    for (auto* s : {jost, transform, kernel, sqfn, apscan, window, verify}) add_common(s, f);
    transform->add_option("--input", f.input, "gaussian | zero | bound:<b> | file with f or r,f per line");
    verify->add_option("--suite", f.suite, "all | free-only");
    verify->add_option("--only", f.only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const WorkerPool pool(f.threads);
        if (jost->parsed()) return cmd_jost(resolve(f, "jost"), pool);
        if (transform->parsed()) return cmd_transform(resolve(f, "transform"), pool);
        if (kernel->parsed()) return cmd_kernel(resolve(f, "kernel"), pool);
        if (sqfn->parsed()) return cmd_sqfn(resolve(f, "sqfn"), pool);
        if (apscan->parsed()) {
            Flags g = f;
            if (!g.potential && g.config.empty()) g.potential = "free";  // the scan does not use V
            return cmd_apscan(resolve(g, "apscan"));
        }
        if (window->parsed()) return cmd_window(resolve(f, "window"), pool);
        if (verify->parsed()) {
            Flags g = f;
            if (!g.potential && g.config.empty()) {
                g.potential = "aubin";
                g.a = g.a.value_or(1.0);
            }
            return cmd_verify(resolve(g, "verify"), f.only, pool);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
