#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dftlab/multiplier/multiplier.hpp"
#include "dftlab/numerics/grid.hpp"
#include "dftlab/potentials/potential.hpp"

namespace dftlab {

/// Raised for invalid configurations; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PotentialSpec {
    std::string name = "aubin";   // free | aubin | table
    std::optional<double> a;      // aubin parameter
    double scale = 1.0;           // V -> scale * V
    std::string table;            // path for name == table
};

struct RunConfig {
    PotentialSpec potential;
    double r_max = 200.0;
    std::size_t n = 8192;
    int j_min = -6;
    int j_max = 4;
    std::string grading = "uniform";
    std::string multiplier = "high_pass";  // high_pass | low_pass | constant | sin_log | block:<j>
    std::string experiment;
    std::string out = "out";
    std::uint64_t seed = 1;
    std::vector<double> ps{1.2, 1.4, 1.6, 1.8, 2.0, 2.5, 2.8, 3.2, 4.0};
    std::string suite = "all";  // all | free-only
    std::string input;          // input samples for transform
    double kernel_r_max = 120.0;
    std::size_t kernel_stride = 8;

    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; unknown keys are rejected.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);

    /// Throws ConfigError on the first violated precondition.
    void validate() const;

    PotentialModel make_potential() const;
    RadialGrid make_radial_grid() const;
    SpectralGrid make_spectral_grid() const;
    Multiplier make_multiplier() const;
};

/// Writes `report` with {"config": ...} prepended, two-space indented.
void write_json_report(const std::filesystem::path& path, const nlohmann::json& report, const RunConfig& config);

}  // namespace dftlab
