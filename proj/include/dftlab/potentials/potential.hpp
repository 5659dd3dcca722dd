#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dftlab/numerics/grid.hpp"

namespace dftlab {

/// Real radial potential V(r) with closed-form or interpolated V'(r).
///
/// `beta` is the claimed decay exponent, |V| <~ <r>^-beta and
/// |V'| <~ <r>^-(beta+1). `tail_moment(R)` returns int_R^inf r |V(r)| dr,
/// which bounds the error of truncating the Volterra sweeps at R.
class PotentialModel {
public:
    using Fn = std::function<double(double)>;

    PotentialModel(std::string label, double beta, Fn value, Fn derivative, Fn tail_moment,
                   nlohmann::json description);

    double operator()(double r) const { return value_(r); }
    double derivative(double r) const { return derivative_(r); }
    double tail_moment(double r) const { return tail_(r); }
    double beta() const { return beta_; }
    const std::string& label() const { return label_; }
    const nlohmann::json& description() const { return description_; }

    /// Same profile with a different claimed decay exponent.
    PotentialModel with_beta(double beta) const;
    /// s * V.
    PotentialModel scaled(double s) const;

    std::vector<double> sample(std::span<const double> r) const;
    bool is_zero() const { return zero_; }

private:
    std::string label_;
    double beta_;
    Fn value_, derivative_, tail_;
    nlohmann::json description_;
    bool zero_ = false;

    friend PotentialModel free_potential();
};

PotentialModel free_potential();

/// Linearisation of -Delta phi = phi^5 about the Aubin solution:
/// V(r) = -5 phi^4(r, a) = -15 a (1 + a r^2)^-2, beta = 4.
PotentialModel aubin_potential(double a);

/// phi(r, a) = (3a)^(1/4) (1 + a r^2)^(-1/2).
double eval_phi(double r, double a);
/// d phi / d a in closed form.
double eval_dphi_da(double r, double a);

/// Plain-text table: a "# beta=<float>" header line, then whitespace
/// separated "r V" rows with strictly increasing r. Natural cubic spline for
/// V, spline derivative for V', zero outside the tabulated range.
PotentialModel load_tabulated_potential(const std::filesystem::path& path);
PotentialModel parse_tabulated_potential(std::istream& in, const std::string& label);

struct DecayReport {
    double c_v = 0.0;         // sup <r>^beta |V| over grid nodes r >= 1
    double c_dv = 0.0;        // sup <r>^(beta+1) |V'|
    double growth_v = 0.0;    // log-log slope of <r>^beta |V| over the outer decade
    double growth_dv = 0.0;
    bool pass = false;
    nlohmann::json to_json() const;
};

/// Decay certificate on the sampled grid. A weighted profile still growing
/// over the outer decade (slope > 0.05) counts as an infinite supremum.
DecayReport check_decay(const PotentialModel& p, const RadialGrid& grid);

}  // namespace dftlab
