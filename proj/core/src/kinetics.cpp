#include "gmrd/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gmrd/errors.hpp"

namespace gmrd {

void KineticsParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw InvalidArgument(std::string("coefficient ") + name + " must be positive");
        }
    };
    auto non_negative = [](double x, const char* name) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvalidArgument(std::string("coefficient ") + name + " must be non-negative");
        }
    };
    positive(a, "a");
    positive(b, "b");
    positive(c, "c");
    positive(d, "d");
    positive(mu_u, "mu_u");
    positive(mu_v, "mu_v");
    non_negative(h_u, "h_u");
    non_negative(h_v, "h_v");
    non_negative(u_bar, "u_bar");
}

KineticsParams KineticsParams::scaled_reaction(double factor) const {
    KineticsParams out = *this;
    out.a *= factor;
    out.b *= factor;
    out.c *= factor;
    out.d *= factor;
    return out;
}

std::string to_string(FixedPointKind kind) {
    switch (kind) {
        case FixedPointKind::stable_node: return "stable_node";
        case FixedPointKind::stable_focus: return "stable_focus";
        case FixedPointKind::center: return "center";
        case FixedPointKind::unstable_focus: return "unstable_focus";
        case FixedPointKind::unstable_node: return "unstable_node";
        case FixedPointKind::saddle: return "saddle";
        case FixedPointKind::degenerate: return "degenerate";
    }
    return "unknown";
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::type1: return "type1";
        case Regime::type2: return "type2";
        case Regime::degenerate: return "degenerate";
    }
    return "unknown";
}

Rates reaction_rates(double u, double v, const KineticsParams& p) {
    if (!(v > -1.0)) throw DomainError("reaction_rates: inhibitor must satisfy v > -1");
    return {-p.a * u + p.b * u * u / (1.0 + v), -p.c * v + p.d * u * u};
}

Jacobian reaction_jacobian(double u, double v, const KineticsParams& p) {
    if (!(v > -1.0)) throw DomainError("reaction_jacobian: inhibitor must satisfy v > -1");
    const double inv = 1.0 / (1.0 + v);
    return {{{-p.a + 2.0 * p.b * u * inv, -p.b * u * u * inv * inv}, {2.0 * p.d * u, -p.c}}};
}

double fixed_point_tolerance(double u, double v) {
    return 1e-10 * std::max({1.0, std::abs(u), std::abs(v)});
}

FixedPoint classify_fixed_point(const KineticsParams& p, double u, double v) {
    const Rates r = reaction_rates(u, v, p);
    const double tol = fixed_point_tolerance(u, v);
    if (std::abs(r.du) > tol || std::abs(r.dv) > tol) {
        throw InvalidArgument("classify_fixed_point: (u, v) is not a fixed point of the reaction");
    }
    const Jacobian j = reaction_jacobian(u, v, p);
    FixedPoint fp;
    fp.u = u;
    fp.v = v;
    fp.trace = j[0][0] + j[1][1];
    fp.det = j[0][0] * j[1][1] - j[0][1] * j[1][0];

    const double scale = std::max({std::abs(j[0][0]), std::abs(j[1][1]), std::abs(j[0][1]),
                                   std::abs(j[1][0]), 1e-300});
    const double eps = 1e-12;
    const double discriminant = fp.trace * fp.trace - 4.0 * fp.det;
    if (std::abs(fp.det) <= eps * scale * scale) {
        fp.kind = FixedPointKind::degenerate;
    } else if (fp.det < 0.0) {
        fp.kind = FixedPointKind::saddle;
    } else if (std::abs(fp.trace) <= eps * scale) {
        fp.kind = FixedPointKind::center;
    } else if (fp.trace < 0.0) {
        fp.kind = discriminant >= 0.0 ? FixedPointKind::stable_node : FixedPointKind::stable_focus;
    } else {
        fp.kind = discriminant >= 0.0 ? FixedPointKind::unstable_node : FixedPointKind::unstable_focus;
    }
    return fp;
}

std::vector<FixedPoint> fixed_points(const KineticsParams& p) {
    p.validate();
    std::vector<FixedPoint> out;
    out.push_back(classify_fixed_point(p, 0.0, 0.0));

    const double cb = p.c * p.b;
    const double radicand = cb * cb - 4.0 * p.a * p.a * p.c * p.d;
    const double tol = 1e-12 * cb * cb;
    if (radicand < -tol) return out;

    if (radicand <= tol) {
        const double u = cb / (2.0 * p.d * p.a);
        FixedPoint fp = classify_fixed_point(p, u, p.b / p.a * u - 1.0);
        fp.double_root = true;
        out.push_back(fp);
        return out;
    }
    const double u1 = (cb + std::sqrt(radicand)) / (2.0 * p.d * p.a);
    // Product of the roots is c/d; avoids cancellation in the smaller root.
    const double u2 = (p.c / p.d) / u1;
    out.push_back(classify_fixed_point(p, u1, p.b / p.a * u1 - 1.0));
    out.push_back(classify_fixed_point(p, u2, p.b / p.a * u2 - 1.0));
    return out;
}

Regime regime_type(const KineticsParams& p) {
    p.validate();
    const double lhs = p.b * p.b * p.c;
    const double rhs = 4.0 * p.a * p.a * p.d;
    if (std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs)) return Regime::degenerate;
    return lhs < rhs ? Regime::type1 : Regime::type2;
}

Nullclines nullclines(const KineticsParams& p, double u_max, int n) {
    if (!(u_max > 0.0) || n < 2) throw InvalidArgument("nullclines: need u_max > 0 and n >= 2");
    Nullclines out;
    out.activator.reserve(static_cast<std::size_t>(n));
    out.inhibitor.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = u_max * i / (n - 1);
        out.activator.push_back({u, p.b / p.a * u - 1.0});
        out.inhibitor.push_back({u, p.d / p.c * u * u});
    }
    return out;
}

std::vector<double> nullcline_intersections(const Nullclines& curves) {
    std::vector<double> out;
    const std::size_t n = std::min(curves.activator.size(), curves.inhibitor.size());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double g0 = curves.activator[i].v - curves.inhibitor[i].v;
        const double g1 = curves.activator[i + 1].v - curves.inhibitor[i + 1].v;
        if (g0 == 0.0) {
            out.push_back(curves.activator[i].u);
        } else if (g0 * g1 < 0.0) {
            const double s = g0 / (g0 - g1);
            out.push_back(curves.activator[i].u + s * (curves.activator[i + 1].u - curves.activator[i].u));
        }
    }
    return out;
}

void write_fixed_points_csv(std::ostream& os, const std::vector<FixedPoint>& points) {
    os.precision(12);
    os << "u,v,kind,trace,det\n";
    for (const FixedPoint& fp : points) {
        os << fp.u << ',' << fp.v << ',' << to_string(fp.kind) << ',' << fp.trace << ',' << fp.det << '\n';
    }
}

void write_nullclines_csv(std::ostream& os, const Nullclines& curves) {
    os.precision(12);
    os << "u,v_activator,v_inhibitor\n";
    for (std::size_t i = 0; i < curves.activator.size(); ++i) {
        os << curves.activator[i].u << ',' << curves.activator[i].v << ',' << curves.inhibitor[i].v << '\n';
    }
}

}  // namespace gmrd
