#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gmrd/fem.hpp"
#include "gmrd/kinetics.hpp"
#include "gmrd/mesh.hpp"

namespace gmrd {

// Assembled once per mesh and shared read-only between states.
struct Operators {
    SparseOperator stiffness;
    Vector mass;              // lumped mass diagonal
    SparseOperator boundary;  // Robin boundary mass
    Vector boundary_load;
    bool lumped_boundary = true;
};

std::shared_ptr<const Operators> assemble_operators(const Mesh& mesh, bool lumped_boundary = true);

enum class BoundaryKind { robin, dirichlet };

// Robin: du/dn = h_u (u_bar - u), dv/dn = -h_v v (background 0 for v).
// Dirichlet: u = u_b, v = v_b on the whole boundary.
struct BoundaryMode {
    BoundaryKind kind = BoundaryKind::robin;
    double u_b = 0.0;
    double v_b = 0.0;

    static BoundaryMode robin() { return {}; }
    static BoundaryMode dirichlet(double u_b, double v_b) { return {BoundaryKind::dirichlet, u_b, v_b}; }
};

std::string to_string(BoundaryKind kind);

using InitialValue = std::variant<double, Field>;

struct SimState {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const Operators> ops;
    KineticsParams params;
    BoundaryMode boundary;
    Field f;  // activator source
    Field g;  // inhibitor source
    Field u;
    Field v;
    double t = 0.0;

    std::size_t n() const { return static_cast<std::size_t>(u.size()); }
};

// Validates parameters and data. Initial fields must be non-negative; in
// Dirichlet mode they must equal the boundary values on boundary nodes.
SimState init_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const Operators> ops,
                    const KineticsParams& params, const InitialValue& u0, const InitialValue& v0,
                    const BoundaryMode& boundary, const SourceSpec& f = {}, const SourceSpec& g = {});
SimState init_state(std::shared_ptr<const Mesh> mesh, const KineticsParams& params,
                    const InitialValue& u0, const InitialValue& v0, const BoundaryMode& boundary,
                    const SourceSpec& f = {}, const SourceSpec& g = {});

struct TimeDerivative {
    Field du;
    Field dv;
};

// u_t = M^-1 (-mu (K + h B) u + mu h u_bar l + M r(u, v) + M f); zero on
// Dirichlet-constrained nodes.
TimeDerivative semi_discrete_rhs(const SimState& state);

// Largest forward-Euler step allowed by a Gershgorin bound on the diffusion
// and Robin operator M^-1 mu (K + h B) for both species.
double explicit_stable_dt(const SimState& state);

// Forward Euler. Throws IntegrationError on a non-finite result.
void step_explicit(SimState& state, double dt);

enum class LinearSolverKind { cholesky, cg };

std::string to_string(LinearSolverKind kind);

// Diffusion and Robin terms implicit, reactions and sources explicit:
//   (M + dt mu (K + h B)) u^{n+1} = M u^n + dt (M r + M f + mu h u_bar l).
// The two species matrices are built and factorized once per dt.
class ImexStepper {
public:
    ImexStepper(const SimState& state, double dt, LinearSolverKind solver = LinearSolverKind::cholesky);
    ~ImexStepper();
    ImexStepper(ImexStepper&&) noexcept;
    ImexStepper& operator=(ImexStepper&&) noexcept;

    void step(SimState& state);
    double dt() const noexcept { return dt_; }
    // Iterations used by the last CG solves (u, v); zero for Cholesky.
    std::pair<int, int> last_iterations() const noexcept { return last_iterations_; }

private:
    struct Species;
    double dt_;
    LinearSolverKind solver_;
    std::unique_ptr<Species> u_;
    std::unique_ptr<Species> v_;
    std::pair<int, int> last_iterations_{0, 0};
};

// One IMEX step with a freshly assembled stepper.
void step_imex(SimState& state, double dt, LinearSolverKind solver = LinearSolverKind::cholesky);

enum class EventAction { zero_source_f };

struct Event {
    double time = 0.0;
    EventAction action = EventAction::zero_source_f;
};

void apply_event(SimState& state, EventAction action);

struct Schedule {
    double dt = 1e-4;
    double t_end = 3.0;
    std::vector<double> snapshot_times;  // sorted, within [0, t_end]
    std::vector<Event> events;
    int diagnostics_every = 10;

    void validate() const;
};

// Log-spaced times in [t_min, t_end], prefixed with 0 and ending at t_end.
std::vector<double> log_spaced_times(double t_min, double t_end, int count);

enum class Integrator { explicit_euler, imex };

std::string to_string(Integrator integrator);

struct Snapshot {
    double t = 0.0;
    Field u;
    Field v;
};

struct Diagnostics {
    double t = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    double l2_u = 0.0;
    double l2_v = 0.0;
    double ut_l2 = 0.0;
    double vt_l2 = 0.0;
    double grad_l2 = 0.0;  // sqrt(|u|_H1^2 + |v|_H1^2)
    double asymmetry = 0.0;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<Diagnostics> timeseries;
    // Max nodal |u^{n+1} - u^n|, |v^{n+1} - v^n| for each step, with its start time.
    std::vector<double> step_times;
    std::vector<double> step_changes;
    double dt = 0.0;
    double t_end = 0.0;
    std::optional<double> steady_state_time;
    // Smallest nodal value seen at any step.
    double min_u = 0.0;
    double min_v = 0.0;
    std::vector<std::string> warnings;
    SimState final_state;
};

struct RunOptions {
    Integrator integrator = Integrator::imex;
    LinearSolverKind linear_solver = LinearSolverKind::cholesky;
    int n_bins = 0;  // 0: ring_aligned_bins(mesh)
    double steady_window = 1.0;
    double steady_threshold = 1e-6;
};

// Integrates to schedule.t_end. Snapshot and event times are snapped to the
// nearest step; a warning is recorded when a time is not a multiple of dt.
Trajectory run(SimState initial, const Schedule& schedule, const RunOptions& options = {});

// Earliest t* such that every step change in [t*, t* + window] is below
// `threshold`; requires t* + window <= t_end.
std::optional<double> detect_steady(const Trajectory& trajectory, double window = 1.0,
                                    double threshold = 1e-6);
std::optional<double> detect_steady(const std::vector<double>& step_times,
                                    const std::vector<double>& step_changes, double dt, double t_end,
                                    double window, double threshold);

}  // namespace gmrd
