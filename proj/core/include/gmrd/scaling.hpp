#pragma once

#include <iosfwd>

#include "gmrd/kinetics.hpp"

namespace gmrd {

// Physical units: micrometres, seconds. Species "a" is the activator,
// "i" the inhibitor.
struct PhysicalParams {
    double mu_a = 0.0;      // um^2/s
    double mu_i = 0.0;
    double lambda_a = 0.0;  // 1/s
    double k_a = 0.0;
    double lambda_i = 0.0;
    double k_i = 0.0;
    double H_a = 0.0;       // 1/um
    double H_i = 0.0;
    double L = 500.0;       // colony radius, um
    double tau = 86400.0;   // time unit, s
    double u_bar = 0.0;     // background activator, physical concentration
    double u_ref = 1.0;     // concentration scales
    double v_ref = 1.0;

    // Throws InvalidArgument unless rates, lengths and scales are positive
    // (H and u_bar may be zero).
    void validate() const;
};

// x -> L x, t -> tau t, u -> u_ref u, v -> v_ref v.
KineticsParams nondimensionalize(const PhysicalParams& p);
PhysicalParams dimensionalize(const KineticsParams& k, double L, double tau, double u_ref = 1.0,
                              double v_ref = 1.0);

// Noggin/BMP4 physical values with the Table-style defaults.
PhysicalParams bmp4_physical();

void write_physical(std::ostream& os, const PhysicalParams& p);
void write_kinetics(std::ostream& os, const KineticsParams& k);

}  // namespace gmrd
