#include "dftlab/numerics/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace dftlab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = n;
    return f;
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::abs(y[i]);
        if (x[i] > 0 && a > 0 && std::isfinite(a)) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(a));
        }
    }
    return fit_line(lx, ly);
}

Envelope log_binned_envelope(std::span<const double> x, std::span<const double> y, double lo, double hi,
                             std::size_t bins) {
    if (!(lo > 0 && hi > lo) || bins == 0) throw std::invalid_argument("log_binned_envelope: bad range");
    std::vector<double> best(bins, -1.0);
    const double llo = std::log(lo), span = std::log(hi) - llo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        auto b = static_cast<std::size_t>((std::log(x[i]) - llo) / span * bins);
        if (b >= bins) b = bins - 1;
        best[b] = std::max(best[b], std::abs(y[i]));
    }
    Envelope e;
    for (std::size_t b = 0; b < bins; ++b) {
        if (best[b] <= 0) continue;
        e.x.push_back(std::exp(llo + span * (b + 0.5) / bins));
        e.y.push_back(best[b]);
    }
    return e;
}

}  // namespace dftlab
