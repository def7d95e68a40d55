#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmrd/analysis.hpp"
#include "gmrd/experiment.hpp"
#include "gmrd/kinetics.hpp"
#include "gmrd/steady.hpp"

namespace gmrd {

struct PreparedMesh {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Operators> ops;
};

PreparedMesh prepare_mesh(const MeshSettings& settings);
SimState make_state(const ExperimentSpec& spec, const PreparedMesh& mesh);

// Integrates the spec (tcut and snapshots resolved) on an existing mesh.
Trajectory run(const ExperimentSpec& spec, const PreparedMesh& mesh);

struct ScenarioReport {
    Trajectory trajectory;
    std::vector<FixedPoint> fixed_points;
    Regime regime = Regime::degenerate;
    RadialProfile u_profile;
    RadialProfile v_profile;
    std::vector<PhasePoint> phase_curve;
    double turning_angle = 0.0;
    // (snapshot time, wavefront radius at fraction 0.5)
    std::vector<std::pair<double, std::optional<double>>> wavefront;
    double asymmetry_peak = 0.0;
    DecayFit decay;
    double lambda1 = 0.0;
    std::vector<std::string> files;
};

ScenarioReport analyze(const ExperimentSpec& spec, const Mesh& mesh, Trajectory trajectory);

// Runs the spec and writes every output into spec.output_dir:
// mesh.txt, config.txt, snapshots/, timeseries.csv, profile.csv, profiles.csv,
// phase_curve.csv, wavefront.csv, fixed_points.csv, nullclines.csv, summary.txt.
// On failure a FAILED file with the error is left next to the partial output.
ScenarioReport run_scenario(const ExperimentSpec& spec);

void write_summary(std::ostream& os, const ExperimentSpec& spec, const ScenarioReport& report);

enum class TerminalClass { zero_state, nonzero_state, failed };
std::string to_string(TerminalClass cls);

struct SweepEntry {
    double tcut = 0.0;
    TerminalClass cls = TerminalClass::failed;
    double terminal_l2 = 0.0;
    std::string error;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::optional<std::pair<double, double>> bracket;
    double cutoff = 1e-3;
};

struct SweepOptions {
    int threads = 0;  // 0: RD_THREADS, else hardware concurrency
    double cutoff = 1e-3;
    int diagnostics_every = 100;
    std::string output_dir;  // empty: nothing written
};

// Thread count honouring RD_THREADS as an upper bound.
int worker_threads(int requested);

SweepResult tcut_sweep(const ExperimentSpec& spec, const std::vector<double>& tcuts,
                       const SweepOptions& options = {});
void write_sweep_csv(std::ostream& os, const SweepResult& result);

struct AttractionResult {
    std::vector<double> times;
    std::vector<double> distance;  // |u_A - u_B|_2 + |v_A - v_B|_2
};

// Runs the spec from two initial data sets and samples the distance every
// `sample_every` time units.
AttractionResult attraction_test(const ExperimentSpec& spec, const InitialSpec& u_a,
                                 const InitialSpec& v_a, const InitialSpec& u_b,
                                 const InitialSpec& v_b, double sample_every = 0.05);

SteadyState solve_steady_newton(const ExperimentSpec& spec, const PreparedMesh& mesh,
                                const Field& u_guess, const Field& v_guess,
                                const NewtonOptions& options = {});

}  // namespace gmrd
