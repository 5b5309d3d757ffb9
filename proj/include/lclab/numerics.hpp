#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>

#include "lclab/errors.hpp"

namespace lclab {

// Bisection on [a, b]; fa, fb must straddle zero.
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double tol, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw NoBracket("bisection endpoints do not straddle zero");
    for (int i = 0; i < max_iter && b - a > tol; ++i) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// C-infinity bump on (-1, 1), value 1 at 0, identically 0 outside.
inline double mollifier(double s) {
    double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

// C-infinity monotone step: 0 for s <= 0, 1 for s >= 1.
inline double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double a = std::exp(-1.0 / s);
    double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

// C-infinity window: rises over [lo0, lo1], falls over [hi0, hi1].
inline double smooth_window(double x, double lo0, double lo1, double hi0, double hi1) {
    return smooth_step((x - lo0) / (lo1 - lo0)) * (1.0 - smooth_step((x - hi0) / (hi1 - hi0)));
}

// Numerically stable triangle area from side lengths (Kahan's ordering).
inline double triangle_area(double a, double b, double c) {
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    double q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return 0.25 * std::sqrt(std::max(0.0, q));
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Shortest-ish decimal form that round-trips a double; used everywhere a
// number reaches a report so reruns stay byte-identical.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace lclab
