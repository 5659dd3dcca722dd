#include "dftlab/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dftlab {

nlohmann::json RunConfig::to_json() const {
    nlohmann::json pot = {{"name", potential.name}, {"scale", potential.scale}};
    pot["a"] = potential.a ? nlohmann::json(*potential.a) : nlohmann::json(nullptr);
    if (!potential.table.empty()) pot["table"] = potential.table;
    return {{"potential", pot},
            {"r_max", r_max},
            {"n", n},
            {"j_min", j_min},
            {"j_max", j_max},
            {"grading", grading},
            {"multiplier", multiplier},
            {"experiment", experiment},
            {"out", out},
            {"seed", seed},
            {"ps", ps},
            {"suite", suite},
            {"input", input},
            {"kernel_r_max", kernel_r_max},
            {"kernel_stride", kernel_stride}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known = {"potential", "r_max", "n",     "j_min", "j_max",        "grading",
                                                "multiplier", "experiment", "out", "seed",  "ps",           "suite",
                                                "input",     "kernel_r_max", "kernel_stride"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
    RunConfig c;
    try {
        if (j.contains("potential")) {
            const auto& p = j.at("potential");
            if (p.is_string()) {
                c.potential.name = p.get<std::string>();
            } else {
                c.potential.name = p.value("name", c.potential.name);
                if (p.contains("a") && !p.at("a").is_null()) c.potential.a = p.at("a").get<double>();
                c.potential.scale = p.value("scale", 1.0);
                c.potential.table = p.value("table", std::string());
            }
        }
        c.r_max = j.value("r_max", c.r_max);
        c.n = j.value("n", c.n);
        c.j_min = j.value("j_min", c.j_min);
        c.j_max = j.value("j_max", c.j_max);
        c.grading = j.value("grading", c.grading);
        c.multiplier = j.value("multiplier", c.multiplier);
        c.experiment = j.value("experiment", c.experiment);
        c.out = j.value("out", c.out);
        c.seed = j.value("seed", c.seed);
        c.ps = j.value("ps", c.ps);
        c.suite = j.value("suite", c.suite);
        c.input = j.value("input", c.input);
        c.kernel_r_max = j.value("kernel_r_max", c.kernel_r_max);
        c.kernel_stride = j.value("kernel_stride", c.kernel_stride);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

void RunConfig::validate() const {
    const auto& p = potential;
    if (p.name == "aubin") {
        if (!p.a) throw ConfigError("potential aubin needs the parameter a (--a)");
        if (!(*p.a > 0.0)) throw ConfigError("potential aubin needs a > 0");
    } else if (p.name == "table") {
        if (p.table.empty()) throw ConfigError("potential table needs a file path (--table)");
    } else if (p.name != "free") {
        throw ConfigError("unknown potential '" + p.name + "' (expected free, aubin or table)");
    }
    if (!std::isfinite(p.scale)) throw ConfigError("potential scale must be finite");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("r_max must be positive");
    if (n < 16) throw ConfigError("n must be at least 16");
    if (j_min > j_max) throw ConfigError("j_min must not exceed j_max");
    if (j_max > 10 || j_min < -20) throw ConfigError("dyadic range outside [-20, 10]");
    try {
        (void)grading_from_string(grading);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (double q : ps)
        if (!(q > 1.0) || !std::isfinite(q)) throw ConfigError("every p must lie in (1, inf)");
    if (suite != "all" && suite != "free-only") throw ConfigError("suite must be all or free-only");
    if (kernel_stride == 0) throw ConfigError("kernel_stride must be positive");
    if (!(kernel_r_max > 0.0)) throw ConfigError("kernel_r_max must be positive");
    (void)make_multiplier();
}

PotentialModel RunConfig::make_potential() const {
    PotentialModel base = free_potential();
    if (potential.name == "aubin") base = aubin_potential(potential.a.value_or(1.0));
    else if (potential.name == "table") base = load_tabulated_potential(potential.table);
    return potential.scale == 1.0 ? base : base.scaled(potential.scale);
}

RadialGrid RunConfig::make_radial_grid() const { return build_radial_grid(r_max, n, grading_from_string(grading)); }

SpectralGrid RunConfig::make_spectral_grid() const { return build_spectral_grid(j_min, j_max, r_max); }

Multiplier RunConfig::make_multiplier() const {
    const BumpFunction b = lp_bump();
    if (multiplier == "high_pass") return high_pass(b);
    if (multiplier == "low_pass") return low_pass(b);
    if (multiplier == "constant") return constant_multiplier(1.0);
    if (multiplier == "sin_log") return sin_log();
    if (multiplier.rfind("block:", 0) == 0) {
        try {
            return lp_block(b, std::stoi(multiplier.substr(6)));
        } catch (const std::logic_error&) {
            throw ConfigError("bad block multiplier '" + multiplier + "'");
        }
    }
    throw ConfigError("unknown multiplier '" + multiplier + "'");
}

void write_json_report(const std::filesystem::path& path, const nlohmann::json& report, const RunConfig& config) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    nlohmann::json out = {{"config", config.to_json()}};
    for (const auto& [k, v] : report.items()) out[k] = v;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << out.dump(2) << '\n';
}

}  // namespace dftlab
