#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dftlab/jost/bound_states.hpp"
#include "dftlab/numerics/bump.hpp"
#include "dftlab/numerics/jet.hpp"
#include "dftlab/spectral/spectral.hpp"

namespace dftlab {

enum class Support { high, low, full };

std::string to_string(Support s);

/// Spectral multiplier mu(k) with three derivatives via jets.
class Multiplier {
public:
    using Fn = std::function<Jet(const Jet&)>;

    Multiplier(std::string label, Support support, Fn fn,
               double declared_bound = std::numeric_limits<double>::infinity());

    double operator()(double k) const { return fn_(Jet::constant(k)).value(); }
    Jet operator()(const Jet& k) const { return fn_(k); }
    /// mu and its first three derivatives at k.
    std::array<double, 4> derivatives(double k) const;

    const std::string& label() const { return label_; }
    Support support() const { return support_; }
    double declared_bound() const { return declared_bound_; }

    /// mu sampled on the spectral grid.
    std::vector<double> sample(std::span<const double> ks) const;

private:
    std::string label_;
    Support support_;
    Fn fn_;
    double declared_bound_;
};

Multiplier constant_multiplier(double c = 1.0);
/// Block j of the finite dyadic partition (cumulative at both ends).
Multiplier partition_block(const DyadicPartition& partition, int j);
/// psi(2^-j k), the pure dyadic bump.
Multiplier lp_block(const BumpFunction& bump, int j);
/// 1 - chi(k): zero on (0, 1).
Multiplier high_pass(const BumpFunction& bump);
/// chi(2k): zero on (1, inf).
Multiplier low_pass(const BumpFunction& bump);
/// sum_j sign_j * block_j over the partition's range; signs.size() must
/// equal j_max - j_min + 1.
Multiplier random_sign_lp(const DyadicPartition& partition, std::span<const int> signs);
/// sin(log k).
Multiplier sin_log();
Multiplier product(const Multiplier& a, const Multiplier& b);

struct MikhlinReport {
    std::array<double, 4> constants{};  // sup k^l |mu^(l)(k)|
    double bound = 0.0;
    bool pass = false;
    nlohmann::json to_json() const;
};

/// Log-uniform samples 2^t, t on a lattice with `per_octave` points per
/// octave aligned to integers, so dyadic dilations permute the sample set.
std::vector<double> mikhlin_samples(int lo_octave, int hi_octave, int per_octave = 256);

/// pass iff every constant is finite and <= bound (default: the declared bound).
MikhlinReport check_mikhlin(const Multiplier& mu, std::span<const double> ks,
                            double bound = std::numeric_limits<double>::quiet_NaN());

/// Checks that mu vanishes where its declared support says it must.
bool verify_support(const Multiplier& mu, std::span<const double> ks);

/// Batched M_mu f = F^-1 mu F P_c f; rows of x are inputs on the radial grid.
std::vector<double> apply_multiplier_batch(const Eigenbasis& eb, const BoundStateSet& bound,
                                           std::span<const double> mu_on_grid, std::span<const double> x,
                                           std::size_t count, const WorkerPool* pool = nullptr);
std::vector<double> apply_multiplier(const Eigenbasis& eb, const BoundStateSet& bound, const Multiplier& mu,
                                     std::span<const double> f, const WorkerPool* pool = nullptr);

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double max_abs() const;
};

inline constexpr std::size_t kMaxKernelEntries = std::size_t(1) << 26;

/// K(r_a, r_b) = (2/pi) int mu e(r_a,k) e(r_b,k) dk for radial node indices
/// rows x cols. Throws when rows*cols exceeds kMaxKernelEntries.
Matrix assemble_kernel(const Eigenbasis& eb, const Multiplier& mu, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols, const WorkerPool* pool = nullptr);

/// Kernel evaluation points: every `stride`-th radial node with r <= r_hi.
std::vector<std::size_t> kernel_indices(const RadialGrid& grid, double r_hi, std::size_t stride);

/// Pieces of K on the eigenbasis probe points (see EigenbasisOptions).
///
/// Kpp + Kmm = 2 Re Kpp and Kpm + Kmp = K3 are kept in full. K1 is the
/// explicit term (1/pi) int cos((r-r')k) mu dk, times m(r,0) m(r',0) in the
/// low-energy case, and K2 = 2 Re Kpp - K1. For the
/// low-energy case dK2 = dK2/dr and block_dr[j] = |d/dr K_j^(+,+)| for the
/// dyadic blocks j in [j_min, 0] are computed under the k integral.
struct KernelDecomposition {
    Support support = Support::high;
    bool resonant = false;
    std::vector<double> r;
    double spacing = 0.0;
    Matrix K, Kpp_re, Kpp_im, K3, K1, K2;
    Matrix dK2;
    Matrix dKpp_im;  // Im of d/dr sum_j K_j^(+,+); its real part is dK2 / 2
    std::vector<int> block_j;
    std::vector<Matrix> block_dr;
    std::vector<double> m0;  // m(r, 0) at the probe points

    nlohmann::json summary() const;
};

KernelDecomposition decompose_kernel(const Eigenbasis& eb, const Multiplier& mu,
                                     const DyadicPartition* partition = nullptr, const WorkerPool* pool = nullptr);

struct SlopeFit {
    double slope = 0.0;
    double lo = 0.0, hi = 0.0;
    std::size_t points = 0;
};

struct HighEnergyReport {
    double c2 = 0.0;  // sup <r-r'>^2 |K2|
    double c3 = 0.0;  // sup (r+r') |K3|
    SlopeFit k3_diagonal;  // |K3(r,r)| against r+r'
    SlopeFit k2_offdiagonal;  // sup_{|r-r'|=d} |K2| against d
    double k2_max = 0.0;
    nlohmann::json to_json() const;
};

HighEnergyReport verify_high_energy_bounds(const KernelDecomposition& d, double slope_lo = 10.0,
                                           double slope_hi = 100.0);

struct LowEnergyReport {
    double c2 = 0.0;   // sup |r-r'| |K2|
    double c2r = 0.0;  // sup |r-r'|^2 |dK2/dr|
    SlopeFit dk2_slope;  // sup_{|r-r'|=d} |dK2/dr| against d
    SlopeFit dkpp_slope; // same for |d/dr sum_j K_j^(+,+)|
    std::vector<int> block_j;
    std::vector<double> block_constants;  // sup |d_r K_j| / min(2^2j, |r-r'|^-3 2^-j)
    double block_constant = 0.0;          // max over j
    double block_spread = 0.0;            // max / min over j
    /// No growth toward low frequencies: the constants of the three lowest
    /// blocks stay below the largest constant of the remaining blocks.
    bool block_uniform = false;
    double k1_ratio = 0.0;                // ||K1||_inf / ||K||_inf
    double fd_crosscheck = 0.0;           // max relative gap, analytic vs centred difference
    nlohmann::json to_json() const;
};

LowEnergyReport verify_low_energy_bounds(const KernelDecomposition& d, double slope_lo = 10.0, double slope_hi = 100.0,
                                         std::uint64_t seed = 1);

struct HormanderReport {
    double sup = 0.0;
    std::size_t pairs = 0;
    std::vector<double> values;
    nlohmann::json to_json() const;
};

/// sup over pairs of int_{|r'-r1| > 2|r1-r2|} |K2(r1,r') - K2(r2,r')| dr',
/// with r1, r2 snapped to the nearest kernel point.
HormanderReport hormander_scan(const KernelDecomposition& d, std::span<const std::pair<double, double>> pairs);

/// Quasi-random (Halton) pairs in [lo, hi]^2 with |r1 - r2| >= min_gap.
std::vector<std::pair<double, double>> hormander_pairs(std::size_t count, double lo, double hi, double min_gap);

/// sup_{r,r'} |m(r,k) conj m(r',k) - m(r,0) m(r',0)| per k < 1 on the probes,
/// with the log-log slope fitted over [k_lo, k_hi].
struct SmallnessReport {
    std::vector<double> k;
    std::vector<double> sup;
    double slope = 0.0;
    nlohmann::json to_json() const;
};
SmallnessReport m_rr_smallness(const Eigenbasis& eb, double k_lo = 1e-3, double k_hi = 0.1);

void write_kernel_csv(std::ostream& out, const KernelDecomposition& d, std::size_t stride,
                      const nlohmann::json& config);

}  // namespace dftlab
