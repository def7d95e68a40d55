#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmrd/fem.hpp"
#include "gmrd/kinetics.hpp"
#include "gmrd/scaling.hpp"
#include "gmrd/simulate.hpp"

namespace gmrd {

// u0(x) = value + bump * (1 - |x|^2 / R^2).
struct InitialSpec {
    double value = 0.0;
    double bump = 0.0;

    Field evaluate(const Mesh& mesh) const;
};

struct MeshSettings {
    double radius = 1.0;
    double target_h = 0.02;
    std::size_t max_nodes = 2'000'000;
};

struct ExperimentSpec {
    std::string preset;  // empty for a fully explicit configuration
    KineticsParams params;
    SourceSpec f;
    SourceSpec g;
    InitialSpec u0;
    InitialSpec v0{};
    BoundaryMode boundary;
    MeshSettings mesh;
    Schedule schedule;
    std::optional<double> tcut;  // time at which f is switched off
    int snapshot_count = 12;     // log-spaced snapshots when no explicit times are given
    RunOptions run;
    std::string output_dir = "out";
    // Where each resolved value came from: "preset", "config" or "default".
    std::map<std::string, std::string> provenance;
    std::vector<std::string> notes;

    // Fills schedule.snapshot_times and events from tcut/snapshot_count.
    Schedule resolved_schedule() const;
    void validate() const;
};

std::vector<std::string> preset_names();
// Throws InvalidArgument for an unknown name.
ExperimentSpec make_preset(const std::string& name);

// Flat key-value text:
//   preset = "wnt"
//   [mesh]      radius, h, max_nodes
//   [params]    a b c d mu_u mu_v h_u h_v u_bar
//   [source]    f_inner f_outer f_radius g_inner g_outer g_radius
//   [initial]   u0 v0 u0_bump v0_bump
//   [boundary]  kind = robin|dirichlet, u_b, v_b
//   [schedule]  dt t_end tcut snapshots snapshot_times diagnostics_every
//   [solver]    integrator = imex|explicit, linear_solver = cholesky|cg, n_bins
//   [output]    dir
//   [physical]  mu_a mu_i lambda_a k_a lambda_i k_i H_a H_i L tau u_bar u_ref v_ref
// "section.key = value" is accepted anywhere. '#' starts a comment.
// Values from [physical] are nondimensionalized into params; explicit
// [params] keys take precedence.
// Throws ParseError naming the offending line.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);

// Parses only a [physical] block (or its dotted keys); used by the scale verb.
PhysicalParams parse_physical(const std::string& text);

// Resolved configuration with one "# key: provenance" line per value.
void write_spec(std::ostream& os, const ExperimentSpec& spec);

}  // namespace gmrd
