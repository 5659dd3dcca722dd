#pragma once

#include <array>
#include <cmath>

namespace dftlab {

/// Truncated Taylor expansion of order 3 about a point.
///
/// Coefficients are stored as c[l] = f^(l)(x0) / l!, so arithmetic is plain
/// Cauchy-product algebra and derivatives up to third order fall out of any
/// composition of the supported elementary functions.
struct Jet {
    static constexpr int order = 3;
    std::array<double, order + 1> c{};

    static constexpr Jet constant(double v) { return Jet{{v, 0.0, 0.0, 0.0}}; }
    static constexpr Jet variable(double x) { return Jet{{x, 1.0, 0.0, 0.0}}; }

    constexpr double value() const { return c[0]; }

    /// l-th derivative (l <= 3).
    constexpr double derivative(int l) const {
        constexpr double fact[] = {1.0, 1.0, 2.0, 6.0};
        return c[l] * fact[l];
    }

    constexpr Jet operator-() const { return Jet{{-c[0], -c[1], -c[2], -c[3]}}; }

    constexpr Jet& operator+=(const Jet& o) {
        for (int i = 0; i <= order; ++i) c[i] += o.c[i];
        return *this;
    }
    constexpr Jet& operator-=(const Jet& o) {
        for (int i = 0; i <= order; ++i) c[i] -= o.c[i];
        return *this;
    }
    constexpr Jet& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }
};

constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
constexpr Jet operator*(Jet a, double s) { return a *= s; }
constexpr Jet operator*(double s, Jet a) { return a *= s; }
constexpr Jet operator+(Jet a, double s) {
    a.c[0] += s;
    return a;
}
constexpr Jet operator+(double s, Jet a) { return a + s; }
constexpr Jet operator-(Jet a, double s) {
    a.c[0] -= s;
    return a;
}
constexpr Jet operator-(double s, const Jet& a) { return -a + s; }

constexpr Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int n = 0; n <= Jet::order; ++n)
        for (int i = 0; i <= n; ++i) r.c[n] += a.c[i] * b.c[n - i];
    return r;
}

constexpr Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (int n = 0; n <= Jet::order; ++n) {
        double s = a.c[n];
        for (int i = 1; i <= n; ++i) s -= b.c[i] * q.c[n - i];
        q.c[n] = s / b.c[0];
    }
    return q;
}

inline Jet exp(const Jet& a) {
    Jet e;
    e.c[0] = std::exp(a.c[0]);
    for (int n = 1; n <= Jet::order; ++n) {
        double s = 0.0;
        for (int i = 1; i <= n; ++i) s += i * a.c[i] * e.c[n - i];
        e.c[n] = s / n;
    }
    return e;
}

inline Jet log(const Jet& a) {
    Jet l;
    l.c[0] = std::log(a.c[0]);
    for (int n = 1; n <= Jet::order; ++n) {
        double s = 0.0;
        for (int i = 1; i < n; ++i) s += i * l.c[i] * a.c[n - i];
        l.c[n] = (a.c[n] - s / n) / a.c[0];
    }
    return l;
}

inline void sincos(const Jet& a, Jet& s, Jet& co) {
    s = Jet{};
    co = Jet{};
    s.c[0] = std::sin(a.c[0]);
    co.c[0] = std::cos(a.c[0]);
    for (int n = 1; n <= Jet::order; ++n) {
        double ss = 0.0, cc = 0.0;
        for (int i = 1; i <= n; ++i) {
            ss += i * a.c[i] * co.c[n - i];
            cc += i * a.c[i] * s.c[n - i];
        }
        s.c[n] = ss / n;
        co.c[n] = -cc / n;
    }
}

inline Jet sin(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return s;
}

inline Jet cos(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return c;
}

}  // namespace dftlab
