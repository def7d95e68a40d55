#include "gmrd/scaling.hpp"

#include <ostream>

#include "gmrd/errors.hpp"

namespace gmrd {

void PhysicalParams::validate() const {
    const double positive[] = {mu_a, mu_i, lambda_a, k_a, lambda_i, k_i, L, tau, u_ref, v_ref};
    for (double x : positive) {
        if (!(x > 0.0)) throw InvalidArgument("physical parameters must be positive");
    }
    if (H_a < 0.0 || H_i < 0.0 || u_bar < 0.0) {
        throw InvalidArgument("transfer coefficients and background must be non-negative");
    }
}

KineticsParams nondimensionalize(const PhysicalParams& p) {
    p.validate();
    const double ratio = p.u_ref / p.v_ref;
    KineticsParams k;
    k.a = p.lambda_a * p.tau;
    k.b = p.k_a * p.tau * ratio;
    k.c = p.lambda_i * p.tau;
    k.d = p.k_i * p.tau * ratio;
    k.mu_u = p.mu_a * p.tau / (p.L * p.L);
    k.mu_v = p.mu_i * p.tau / (p.L * p.L);
    k.h_u = p.H_a * p.L;
    k.h_v = p.H_i * p.L;
    k.u_bar = p.u_bar / p.u_ref;
    return k;
}

PhysicalParams dimensionalize(const KineticsParams& k, double L, double tau, double u_ref, double v_ref) {
    if (!(L > 0.0) || !(tau > 0.0) || !(u_ref > 0.0) || !(v_ref > 0.0)) {
        throw InvalidArgument("dimensionalize: L, tau and reference scales must be positive");
    }
    const double ratio = u_ref / v_ref;
    PhysicalParams p;
    p.L = L;
    p.tau = tau;
    p.u_ref = u_ref;
    p.v_ref = v_ref;
    p.lambda_a = k.a / tau;
    p.k_a = k.b / (tau * ratio);
    p.lambda_i = k.c / tau;
    p.k_i = k.d / (tau * ratio);
    p.mu_a = k.mu_u * L * L / tau;
    p.mu_i = k.mu_v * L * L / tau;
    p.H_a = k.h_u / L;
    p.H_i = k.h_v / L;
    p.u_bar = k.u_bar * u_ref;
    return p;
}

PhysicalParams bmp4_physical() {
    PhysicalParams p;
    p.mu_a = 11.0;
    p.mu_i = 55.0;
    p.lambda_a = 9e-4;
    p.k_a = 9e-4;
    p.lambda_i = 9e-4;
    p.k_i = 9e-4;
    // Implied by h = 172.8 at L = 500.
    p.H_a = 0.3456;
    p.H_i = 0.3456;
    p.u_bar = 3.0;
    return p;
}

void write_physical(std::ostream& os, const PhysicalParams& p) {
    os << "mu_a = " << p.mu_a << "\nmu_i = " << p.mu_i << "\nlambda_a = " << p.lambda_a
       << "\nk_a = " << p.k_a << "\nlambda_i = " << p.lambda_i << "\nk_i = " << p.k_i
       << "\nH_a = " << p.H_a << "\nH_i = " << p.H_i << "\nL = " << p.L << "\ntau = " << p.tau
       << "\nu_bar = " << p.u_bar << "\nu_ref = " << p.u_ref << "\nv_ref = " << p.v_ref << '\n';
}

void write_kinetics(std::ostream& os, const KineticsParams& k) {
    os << "a = " << k.a << "\nb = " << k.b << "\nc = " << k.c << "\nd = " << k.d
       << "\nmu_u = " << k.mu_u << "\nmu_v = " << k.mu_v << "\nh_u = " << k.h_u
       << "\nh_v = " << k.h_v << "\nu_bar = " << k.u_bar << '\n';
}

}  // namespace gmrd
