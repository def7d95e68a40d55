#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace gmrd {

// Dimensionless Gierer-Meinhardt coefficients:
//   u_t = mu_u lap(u) - a u + b u^2 / (1 + v) + f(x)
//   v_t = mu_v lap(v) - c v + d u^2            + g(x)
// with Robin data du/dn = h_u (u_bar - u), dv/dn = -h_v v.
struct KineticsParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double mu_u = 0.0;
    double mu_v = 0.0;
    double h_u = 0.0;
    double h_v = 0.0;
    double u_bar = 0.0;

    // Throws InvalidArgument unless a,b,c,d,mu_u,mu_v > 0 and h_u,h_v,u_bar >= 0.
    void validate() const;
    // Multiplies a, b, c, d by `factor` (diffusion and boundary data unchanged).
    KineticsParams scaled_reaction(double factor) const;
};

struct Rates {
    double du = 0.0;
    double dv = 0.0;
};

using Jacobian = std::array<std::array<double, 2>, 2>;

enum class FixedPointKind {
    stable_node,
    stable_focus,
    center,
    unstable_focus,
    unstable_node,
    saddle,
    degenerate,  // det == 0: not hyperbolic
};

std::string to_string(FixedPointKind kind);

struct FixedPoint {
    double u = 0.0;
    double v = 0.0;
    FixedPointKind kind = FixedPointKind::degenerate;
    double trace = 0.0;
    double det = 0.0;
    bool double_root = false;
};

enum class Regime { type1, type2, degenerate };

std::string to_string(Regime regime);

// Reaction terms only; sources are added by the solver. Throws DomainError for v <= -1.
Rates reaction_rates(double u, double v, const KineticsParams& p);

// d(rates)/d(u, v) at an arbitrary point. Throws DomainError for v <= -1.
Jacobian reaction_jacobian(double u, double v, const KineticsParams& p);

// Residual tolerance used to accept (u, v) as a fixed point.
double fixed_point_tolerance(double u, double v);

// Classification from the sign pattern of (trace, det, trace^2 - 4 det).
// Throws InvalidArgument when (u, v) is not a fixed point.
FixedPoint classify_fixed_point(const KineticsParams& p, double u, double v);

// Closed-form roots: always the origin; plus u = (cb +- sqrt((cb)^2 - 4a^2cd)) / (2da),
// v = (b/a) u - 1 when the radicand is positive (a single double root at zero).
// Ordered: origin, larger root, smaller root.
std::vector<FixedPoint> fixed_points(const KineticsParams& p);

// Type 1 iff b^2 c < 4 a^2 d, type 2 iff b^2 c > 4 a^2 d.
Regime regime_type(const KineticsParams& p);

struct NullclineSample {
    double u = 0.0;
    double v = 0.0;
};

struct Nullclines {
    // Non-trivial activator branch v = (b/a) u - 1 (the other branch is u = 0).
    std::vector<NullclineSample> activator;
    // v = (d/c) u^2
    std::vector<NullclineSample> inhibitor;
};

// Both curves sampled at n equally spaced u in [0, u_max].
Nullclines nullclines(const KineticsParams& p, double u_max, int n);

// u-coordinates where the sampled curves cross (linear interpolation).
std::vector<double> nullcline_intersections(const Nullclines& curves);

void write_fixed_points_csv(std::ostream& os, const std::vector<FixedPoint>& points);
void write_nullclines_csv(std::ostream& os, const Nullclines& curves);

}  // namespace gmrd
