#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dftlab/io/config.hpp"
#include "dftlab/numerics/parallel.hpp"

namespace dftlab {

/// Pass thresholds for the acceptance criteria.
struct Tolerances {
    double free_sine = 1e-12;
    double free_roundtrip = 1e-6;
    double free_lp_ratio = 1e-4;
    double wronskian = 1e-5;
    double wronskian_order = 1.8;
    double determinant = 1e-8;
    double resonance = 1e-3;
    double free_f00 = 1e-12;
    double parseval = 1e-4;
    double k3_slope = -1.0;
    double k3_slope_tol = 0.15;
    double mesh_stability = 0.10;
    double k1_ratio = 1e-3;
    double dk2_slope = -2.0;
    double dk2_slope_tol = 0.2;
    double growth_threshold = 1.3;
    double sqfn_slack = 1e-4;
    double calculus = 1e-4;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    nlohmann::json data;
};

struct VerifyReport {
    std::vector<CriterionResult> results;
    bool all_pass() const;
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    RunConfig config;  // grid, dyadic range and seed; potentials are fixed per criterion
    Tolerances tol;
    std::set<int> only;  // empty: every criterion of the suite
    const WorkerPool* pool = nullptr;
    std::function<void(const CriterionResult&)> on_result;
};

/// Criteria of a suite: "all" is 1..12, "free-only" the V = 0 subset.
std::vector<int> suite_criteria(const std::string& suite);

VerifyReport run_verification(const VerifyOptions& options);

/// Small fixed pipeline whose JSON output must be reproducible byte for byte.
nlohmann::json determinism_probe(const RunConfig& config, const WorkerPool* pool = nullptr);

}  // namespace dftlab
