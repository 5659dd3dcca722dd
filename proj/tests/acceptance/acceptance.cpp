// Acceptance suite at reference resolution: one PASS/FAIL line per criterion.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "dftlab/numerics/parallel.hpp"
#include "dftlab/verify/verify.hpp"

using namespace dftlab;

int main(int argc, char** argv) {
    Tolerances tol;
    tol.free_sine = 1e-12;
    tol.free_roundtrip = 1e-6;
    tol.free_lp_ratio = 1e-4;
    tol.wronskian = 1e-5;
    tol.wronskian_order = 1.8;
    tol.determinant = 1e-8;
    tol.resonance = 1e-3;
    tol.free_f00 = 1e-12;
    tol.parseval = 1e-4;
    tol.k3_slope = -1.0;
    tol.k3_slope_tol = 0.15;
    tol.mesh_stability = 0.10;
    tol.k1_ratio = 1e-3;
    tol.dk2_slope = -2.0;
    tol.dk2_slope_tol = 0.2;
    tol.growth_threshold = 1.3;
    tol.sqfn_slack = 1e-4;
    tol.calculus = 1e-4;

    RunConfig cfg;
    cfg.potential.name = "aubin";
    cfg.potential.a = 1.0;
    cfg.r_max = 200.0;
    cfg.n = 8192;
    cfg.j_min = -6;
    cfg.j_max = 4;
    cfg.seed = 1;
    cfg.kernel_r_max = 120.0;
    cfg.kernel_stride = 8;
    cfg.experiment = "acceptance";
    cfg.validate();

    const WorkerPool pool;
    VerifyOptions opt;
    opt.config = cfg;
    opt.tol = tol;
    opt.pool = &pool;
    for (int i = 1; i < argc; ++i) opt.only.insert(std::atoi(argv[i]));
    opt.on_result = [](const CriterionResult& r) {
        std::printf("%s criterion %2d  %-32s %s\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str());
        std::fflush(stdout);
    };
    const auto rep = run_verification(opt);
    std::ofstream("acceptance_report.json") << nlohmann::json{{"config", cfg.to_json()}, {"report", rep.to_json()}}.dump(2)
                                            << '\n';
    std::size_t failed = 0;
    for (const auto& r : rep.results) failed += !r.pass;
    std::printf("%zu/%zu criteria passed\n", rep.results.size() - failed, rep.results.size());
    return failed == 0 ? 0 : 1;
}
