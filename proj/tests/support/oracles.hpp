#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double shoelace(double x0, double y0, double x1, double y1, double x2, double y2) {
    return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
}

// Interior angle at vertex 0 by the law of cosines, degrees.
inline double corner_angle_deg(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double a = std::hypot(x1 - x2, y1 - y2);
    const double b = std::hypot(x0 - x2, y0 - y2);
    const double c = std::hypot(x0 - x1, y0 - y1);
    const double cosine = std::clamp((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

// J0 by its power series (adequate for |x| < 10).
inline double bessel_j0(double x) {
    double term = 1.0;
    double sum = 1.0;
    const double q = -0.25 * x * x;
    for (int k = 1; k < 60; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// First positive zero of J0.
inline double j01() { return bisect(bessel_j0, 2.0, 3.0); }

// Gierer-Meinhardt reaction terms, written out independently.
struct Kin {
    double a, b, c, d;
};

inline std::array<double, 2> gm_rates(const Kin& k, double u, double v) {
    return {-k.a * u + k.b * u * u / (1.0 + v), -k.c * v + k.d * u * u};
}

// Nonzero fixed points via the reduced scalar equation
//   a (1 + (d/c) u^2) = b u   on the inhibitor nullcline,
// located by bisection on either side of its minimum.
inline std::array<double, 2> gm_nonzero_roots(const Kin& k) {
    auto g = [&](double u) { return k.a * (1.0 + (k.d / k.c) * u * u) - k.b * u; };
    const double u_min = k.b * k.c / (2.0 * k.a * k.d);
    return {bisect(g, u_min, 1e6), bisect(g, 0.0, u_min)};
}

}  // namespace oracle
