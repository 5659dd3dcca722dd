#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dftlab/multiplier/multiplier.hpp"

namespace dftlab {

/// (int r^(s p) |f|^p dr)^(1/p) with the grid's transform weights.
double lp_norm(std::span<const double> f, double p, const RadialGrid& grid, double s = 0.0);

/// ||f||_{L^p(R^3)} of a radial profile f(r): (4 pi int r^2 |f|^p dr)^(1/p).
double lp_norm_3d(std::span<const double> f, double p, const RadialGrid& grid);

struct ApRatio {
    double value = 0.0;
    bool divergent = false;
    bool logarithmic = false;  // an exponent equals -1 exactly
};

/// A_p bracket on [a, b] for w = r^s:
/// avg(r^s) * avg(r^(-s/(p-1)))^(p-1), by closed-form power integrals.
ApRatio ap_ratio(double s, double p, double a, double b);

/// [0, b] for b = 1e-2 .. 1e2 and translates [a, a(1 + delta)].
std::vector<std::pair<double, double>> ap_family();

struct ApScan {
    double p = 0.0, s = 0.0;
    double sup = 0.0;
    bool divergent = false;
    bool logarithmic = false;
    std::size_t intervals = 0;
    std::string classification() const { return divergent ? "divergent" : "bounded"; }
    nlohmann::json to_json() const;
};

ApScan ap_scan(double p, std::span<const std::pair<double, double>> family);
ApScan ap_scan(double p);

/// Test inputs on a radial grid, row-major [member][r].
struct TestFamily {
    std::vector<std::string> ids;
    std::vector<double> data;
    std::size_t nr = 0;
    std::size_t size() const { return ids.size(); }
    std::span<const double> member(std::size_t i) const { return {data.data() + i * nr, nr}; }
    void add(std::string id, std::vector<double> f);
};

/// Dyadic bumps centred at 2^i, wave packets at frequencies 2^j, bumps
/// translated toward r_max and 32 seeded random superpositions. Members are
/// projected onto the continuous subspace when `bound` is given.
TestFamily build_test_family(const RadialGrid& grid, std::uint64_t seed, const BoundStateSet* bound = nullptr);

struct OpnormEstimate {
    double bound = 0.0;
    std::string maximizer;
    std::size_t index = 0;
    std::size_t members = 0;
    nlohmann::json to_json() const;
};

/// Batched operator: count inputs of size nr each, row-major.
using BatchOperator = std::function<std::vector<double>(std::span<const double>, std::size_t)>;

/// max over the family of ||r^s T f||_p / ||r^s f||_p.
OpnormEstimate estimate_opnorm(const BatchOperator& T, double p, double s, const TestFamily& family,
                               const RadialGrid& grid);
/// Same, from precomputed outputs (rows aligned with the family).
OpnormEstimate estimate_opnorm(std::span<const double> outputs, double p, double s, const TestFamily& family,
                               const RadialGrid& grid);

/// Norming function of u in the 3D L^q pairing, in lifted variables:
/// g = r^(2-q) |u|^(q-2) u, so that int g u dr = ||r^(2/q-1) u||_q^q.
/// For self-adjoint T, ||T g||_p / ||g||_p bounds ||T||_p from below by at
/// least ||T f||_q / ||f||_q when u = T f and q = p'.
std::vector<double> duality_member(std::span<const double> u, double q, const RadialGrid& grid);

struct SquareFunctionResult {
    std::vector<int> j;
    std::vector<double> blocks;  // row-major [block][r]
    std::vector<double> sf;
    std::size_t nr = 0;
    std::span<const double> block(std::size_t b) const { return {blocks.data() + b * nr, nr}; }
};

/// Blocks psi_j(sqrt H) P_c f for the partition's blocks (cumulative at the
/// ends) and their pointwise l2 sum.
SquareFunctionResult square_function(const Eigenbasis& eb, const BoundStateSet& bound,
                                     const DyadicPartition& partition, std::span<const double> f,
                                     const WorkerPool* pool = nullptr);

/// Fixed-seed random signs, one per partition block.
std::vector<int> random_signs(std::size_t count, std::uint64_t seed);

struct WindowOptions {
    std::vector<double> ps{1.2, 1.4, 1.6, 1.8, 2.0, 2.5, 2.8, 3.2, 4.0};
    std::vector<double> levels{50.0, 100.0, 200.0};  // r_max per refinement level
    double density = 8192.0 / 200.0;                 // radial nodes per unit length
    int j_min = -6, j_max = 4;
    std::size_t patterns = 16;
    std::uint64_t seed = 1;
    /// bound(last level) / bound(first level) above this is "growing".
    double growth_threshold = 1.3;
    /// Enlarge the family per (p, pattern) with the duality member built
    /// from the p'-maximizer.
    bool dual_members = true;
};

struct WindowRow {
    double p = 0.0;
    double level = 0.0;
    double bound = 0.0;
    std::string maximizer_id;
    std::size_t pattern = 0;
};

struct WindowClass {
    double p = 0.0;
    double growth = 0.0;
    std::string classification;
};

struct WindowExperiment {
    std::string potential;
    std::vector<WindowRow> rows;
    std::vector<WindowClass> classes;
    const WindowClass* find(double p) const;
    nlohmann::json to_json() const;
    void write_csv(std::ostream& out, const nlohmann::json& config) const;
};

WindowExperiment lp_window_experiment(const PotentialModel& potential, const WindowOptions& options = {},
                                      const WorkerPool* pool = nullptr);

}  // namespace dftlab
