#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dftlab {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through (x, y).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log|y| against log x; non-positive samples skipped.
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Upper envelope of oscillating samples: maximum of |y| per logarithmic
/// bin of x over [lo, hi]. Empty bins are dropped. Returns bin centres and
/// maxima, ready for loglog_fit.
struct Envelope {
    std::vector<double> x;
    std::vector<double> y;
};
Envelope log_binned_envelope(std::span<const double> x, std::span<const double> y, double lo, double hi,
                             std::size_t bins);

}  // namespace dftlab
