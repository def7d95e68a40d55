#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmrd/fem.hpp"
#include "gmrd/mesh.hpp"
#include "gmrd/simulate.hpp"

namespace gmrd {

// Node-to-bin assignment over [0, R] with equal-width bins, R the outer
// radius. Empty bins are merged into their outer neighbour (the last one
// into its inner neighbour), so every remaining bin owns at least one node.
struct RadialBinning {
    double radius = 0.0;
    int requested_bins = 0;
    int merged_bins = 0;
    std::vector<double> lower;    // bin edges after merging
    std::vector<double> upper;
    std::vector<int> bin_of_node;

    std::size_t size() const { return lower.size(); }
    double center(std::size_t b) const { return 0.5 * (lower[b] + upper[b]); }
};

RadialBinning make_radial_binning(const Mesh& mesh, int n_bins);

struct RadialProfile {
    std::vector<double> centers;
    std::vector<double> mean;    // lumped-mass-weighted bin mean
    std::vector<double> spread;  // max - min within the bin
    double radius = 0.0;
    int merged_bins = 0;

    std::size_t argmax() const;
    double peak() const;
};

RadialProfile radial_profile(const Mesh& mesh, const Field& field, int n_bins);
RadialProfile radial_profile(const RadialBinning& bins, const Vector& lumped_mass, const Field& field);

struct PhasePoint {
    double r = 0.0;
    double u = 0.0;
    double v = 0.0;
};

// Bin means (u(r), v(r)) ordered from the boundary (r = R) to the center.
std::vector<PhasePoint> radial_phase_curve(const Mesh& mesh, const Field& u, const Field& v, int n_bins);

// Sum of absolute heading changes along a polyline in the (u, v) plane, radians.
// Segments shorter than `min_segment` are skipped.
double total_turning_angle(const std::vector<PhasePoint>& curve, double min_segment = 1e-12);

// Smallest bin center where the mean reaches fraction * peak; 0 when the
// innermost bin already does; nullopt for an all-zero profile.
std::optional<double> wavefront_radius(const RadialProfile& profile, double fraction);

// max over bins of (bin max - bin min) / (global max - global min + eps),
// eps = 1e-12 max(1, |field|_inf). Zero for a radially constant field.
double asymmetry_index(const Mesh& mesh, const Field& field, int n_bins);
double asymmetry_index(const RadialBinning& bins, const Field& field);

// sqrt(f^T M f) with the lumped mass, sqrt(f^T K f).
double l2_norm(const Mesh& mesh, const Field& field);
double h1_seminorm(const Mesh& mesh, const Field& field);
double l2_norm(const Operators& ops, const Field& field);
double h1_seminorm(const Operators& ops, const Field& field);

struct RateNorms {
    double u = 0.0;
    double v = 0.0;
};

// M-weighted norms of the semi-discrete time derivative.
RateNorms time_derivative_norms(const SimState& state);

// Least-squares line through log(y) against t on a window.
struct DecayFit {
    double rate = 0.0;       // -slope
    double amplitude = 0.0;  // exp(intercept)
    double t_begin = 0.0;
    double t_end = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
    bool window_shrunk = false;  // non-positive samples were dropped from the ends
    bool degenerate = false;     // fewer than 3 usable points or no variation in t or log(y)
};

DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& y, double t_begin,
                        double t_end);
// Fits |u_t|^2 + |v_t|^2 from a run's diagnostics.
DecayFit decay_rate_fit(const std::vector<Diagnostics>& timeseries, double t_begin, double t_end);

struct PoincareOptions {
    double tolerance = 1e-8;
    int max_iterations = 1000;
    bool lumped_mass = false;
};

struct PoincareResult {
    double lambda1 = 0.0;             // smallest Dirichlet eigenvalue of K x = lambda M x
    double poincare_constant = 0.0;   // 1/sqrt(lambda1), optimal L2 constant
    int iterations = 0;
    double relative_change = 0.0;
};

// Inverse iteration with the boundary nodes constrained to zero.
// Throws ConvergenceError when the tolerance is not reached.
PoincareResult poincare_constant(const Mesh& mesh, const PoincareOptions& options = {});

}  // namespace gmrd
