#include "gmrd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmrd/analysis.hpp"
#include "gmrd/errors.hpp"

namespace gmrd {

std::shared_ptr<const Operators> assemble_operators(const Mesh& mesh, bool lumped_boundary) {
    auto ops = std::make_shared<Operators>();
    ops->stiffness = assemble_stiffness(mesh);
    ops->mass = lumped_mass_diagonal(mesh);
    BoundaryOperator b = assemble_boundary_mass(mesh, lumped_boundary);
    ops->boundary = std::move(b.mass);
    ops->boundary_load = std::move(b.load);
    ops->lumped_boundary = lumped_boundary;
    return ops;
}

std::string to_string(BoundaryKind kind) {
    return kind == BoundaryKind::robin ? "robin" : "dirichlet";
}

std::string to_string(LinearSolverKind kind) {
    return kind == LinearSolverKind::cholesky ? "cholesky" : "cg";
}

std::string to_string(Integrator integrator) {
    return integrator == Integrator::imex ? "imex" : "explicit";
}

namespace {

Field materialize(const InitialValue& value, std::size_t n, const char* name) {
    Field out;
    if (const double* c = std::get_if<double>(&value)) {
        out = Field::Constant(static_cast<Eigen::Index>(n), *c);
    } else {
        out = std::get<Field>(value);
        if (static_cast<std::size_t>(out.size()) != n) {
            throw InvalidArgument(std::string("initial ") + name + " has the wrong length");
        }
    }
    if (!out.allFinite() || (out.size() > 0 && out.minCoeff() < 0.0)) {
        throw InvalidArgument(std::string("initial ") + name + " must be finite and non-negative");
    }
    return out;
}

bool dirichlet(const SimState& s) { return s.boundary.kind == BoundaryKind::dirichlet; }

void pin_boundary(SimState& s) {
    if (!dirichlet(s)) return;
    for (int i : s.mesh->boundary_nodes()) {
        s.u[i] = s.boundary.u_b;
        s.v[i] = s.boundary.v_b;
    }
}

struct Reaction {
    Field ru;
    Field rv;
};

Reaction reaction_terms(const SimState& s) {
    const KineticsParams& p = s.params;
    Reaction r{Field(s.u.size()), Field(s.u.size())};
    for (Eigen::Index i = 0; i < s.u.size(); ++i) {
        const double u = s.u[i];
        const double v = s.v[i];
        if (!(v > -1.0)) {
            throw IntegrationError("inhibitor dropped to v <= -1", s.t, v);
        }
        r.ru[i] = -p.a * u + p.b * u * u / (1.0 + v);
        r.rv[i] = -p.c * v + p.d * u * u;
    }
    return r;
}

void check_finite(const SimState& s) {
    if (!s.u.allFinite() || !s.v.allFinite()) {
        const double norm = std::max(s.u.lpNorm<Eigen::Infinity>(), s.v.lpNorm<Eigen::Infinity>());
        std::ostringstream msg;
        msg << "non-finite state at t=" << s.t;
        throw IntegrationError(msg.str(), s.t, norm);
    }
    const double big = 1e150;
    const double norm = std::max(s.u.lpNorm<Eigen::Infinity>(), s.v.lpNorm<Eigen::Infinity>());
    if (norm > big) {
        std::ostringstream msg;
        msg << "state overflow at t=" << s.t << " (max norm " << norm << ")";
        throw IntegrationError(msg.str(), s.t, norm);
    }
}

}  // namespace

SimState init_state(std::shared_ptr<const Mesh> mesh, std::shared_ptr<const Operators> ops,
                    const KineticsParams& params, const InitialValue& u0, const InitialValue& v0,
                    const BoundaryMode& boundary, const SourceSpec& f, const SourceSpec& g) {
    if (!mesh || !ops) throw InvalidArgument("init_state: mesh and operators are required");
    params.validate();
    SimState s;
    s.mesh = std::move(mesh);
    s.ops = std::move(ops);
    s.params = params;
    s.boundary = boundary;
    const std::size_t n = s.mesh->n_nodes();
    s.u = materialize(u0, n, "u");
    s.v = materialize(v0, n, "v");
    s.f = project_source(*s.mesh, f).values;
    s.g = project_source(*s.mesh, g).values;
    if (dirichlet(s)) {
        if (boundary.u_b < 0.0 || boundary.v_b < 0.0) {
            throw InvalidArgument("Dirichlet boundary values must be non-negative");
        }
        for (int i : s.mesh->boundary_nodes()) {
            const double tol = 1e-12 * std::max(1.0, std::abs(boundary.u_b));
            if (std::abs(s.u[i] - boundary.u_b) > tol ||
                std::abs(s.v[i] - boundary.v_b) > 1e-12 * std::max(1.0, std::abs(boundary.v_b))) {
                throw InvalidArgument(
                    "initial data incompatible with the Dirichlet boundary values at node " +
                    std::to_string(i));
            }
        }
    }
    return s;
}

SimState init_state(std::shared_ptr<const Mesh> mesh, const KineticsParams& params,
                    const InitialValue& u0, const InitialValue& v0, const BoundaryMode& boundary,
                    const SourceSpec& f, const SourceSpec& g) {
    if (!mesh) throw InvalidArgument("init_state: mesh is required");
    auto ops = assemble_operators(*mesh);
    return init_state(std::move(mesh), std::move(ops), params, u0, v0, boundary, f, g);
}

TimeDerivative semi_discrete_rhs(const SimState& s) {
    const Operators& ops = *s.ops;
    const KineticsParams& p = s.params;
    const Reaction r = reaction_terms(s);
    TimeDerivative out;
    if (dirichlet(s)) {
        out.du = (-p.mu_u * (ops.stiffness * s.u)).cwiseQuotient(ops.mass) + r.ru + s.f;
        out.dv = (-p.mu_v * (ops.stiffness * s.v)).cwiseQuotient(ops.mass) + r.rv + s.g;
        for (int i : s.mesh->boundary_nodes()) {
            out.du[i] = 0.0;
            out.dv[i] = 0.0;
        }
    } else {
        const Field flux_u = -p.mu_u * (ops.stiffness * s.u + p.h_u * (ops.boundary * s.u)) +
                             (p.mu_u * p.h_u * p.u_bar) * ops.boundary_load;
        const Field flux_v = -p.mu_v * (ops.stiffness * s.v + p.h_v * (ops.boundary * s.v));
        out.du = flux_u.cwiseQuotient(ops.mass) + r.ru + s.f;
        out.dv = flux_v.cwiseQuotient(ops.mass) + r.rv + s.g;
    }
    return out;
}

double explicit_stable_dt(const SimState& s) {
    const Operators& ops = *s.ops;
    const bool robin = !dirichlet(s);
    double worst = 0.0;
    for (int species = 0; species < 2; ++species) {
        const double mu = species == 0 ? s.params.mu_u : s.params.mu_v;
        const double h = species == 0 ? s.params.h_u : s.params.h_v;
        Vector row_abs = Vector::Zero(ops.stiffness.rows());
        for (Eigen::Index col = 0; col < ops.stiffness.outerSize(); ++col) {
            for (SparseOperator::InnerIterator it(ops.stiffness, col); it; ++it) {
                row_abs[it.row()] += std::abs(it.value());
            }
        }
        if (robin) {
            for (Eigen::Index col = 0; col < ops.boundary.outerSize(); ++col) {
                for (SparseOperator::InnerIterator it(ops.boundary, col); it; ++it) {
                    row_abs[it.row()] += h * std::abs(it.value());
                }
            }
        }
        worst = std::max(worst, mu * row_abs.cwiseQuotient(ops.mass).maxCoeff());
    }
    return 2.0 / worst;
}

void step_explicit(SimState& s, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("step_explicit: dt must be positive");
    const TimeDerivative rate = semi_discrete_rhs(s);
    s.u += dt * rate.du;
    s.v += dt * rate.dv;
    s.t += dt;
    pin_boundary(s);
    check_finite(s);
}

struct ImexStepper::Species {
    double mu = 0.0;
    double h = 0.0;
    double background = 0.0;
    // Robin: full system. Dirichlet: reduced to free nodes.
    std::vector<int> free_nodes;
    Vector lift;  // -A_fc * g_c for the reduced system
    SparseOperator matrix;
    Eigen::SimplicialLDLT<SparseOperator> cholesky;
    Eigen::ConjugateGradient<SparseOperator, Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
};

ImexStepper::ImexStepper(const SimState& s, double dt, LinearSolverKind solver)
    : dt_(dt), solver_(solver) {
    if (!(dt > 0.0)) throw InvalidArgument("ImexStepper: dt must be positive");
    const Operators& ops = *s.ops;
    const auto n = static_cast<Eigen::Index>(s.n());
    SparseOperator mass(n, n);
    {
        std::vector<Eigen::Triplet<double>> diag;
        diag.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) diag.emplace_back(i, i, ops.mass[i]);
        mass.setFromTriplets(diag.begin(), diag.end());
    }

    auto build = [&](double mu, double h, double background, double boundary_value) {
        auto sp = std::make_unique<Species>();
        sp->mu = mu;
        sp->h = h;
        sp->background = background;
        if (dirichlet(s)) {
            SparseOperator system = mass + (dt * mu) * ops.stiffness;
            Vector values = Vector::Zero(n);
            for (int i : s.mesh->boundary_nodes()) values[i] = boundary_value;
            ConstrainedSystem reduced = apply_dirichlet(system, Vector::Zero(n), *s.mesh, values);
            sp->matrix = std::move(reduced.matrix);
            sp->lift = std::move(reduced.rhs);
            sp->free_nodes = std::move(reduced.free_nodes);
        } else {
            sp->matrix = mass + (dt * mu) * (ops.stiffness + h * ops.boundary);
        }
        sp->matrix.makeCompressed();
        if (solver_ == LinearSolverKind::cholesky) {
            sp->cholesky.compute(sp->matrix);
            if (sp->cholesky.info() != Eigen::Success) {
                throw ConvergenceError("IMEX system factorization failed", {});
            }
        } else {
            sp->cg.setTolerance(1e-10);
            sp->cg.setMaxIterations(std::max<Eigen::Index>(1000, sp->matrix.rows()));
            sp->cg.compute(sp->matrix);
            if (sp->cg.info() != Eigen::Success) {
                throw ConvergenceError("IMEX preconditioner setup failed", {});
            }
        }
        return sp;
    };
    u_ = build(s.params.mu_u, s.params.h_u, s.params.u_bar, s.boundary.u_b);
    v_ = build(s.params.mu_v, s.params.h_v, 0.0, s.boundary.v_b);
}

ImexStepper::~ImexStepper() = default;
ImexStepper::ImexStepper(ImexStepper&&) noexcept = default;
ImexStepper& ImexStepper::operator=(ImexStepper&&) noexcept = default;

void ImexStepper::step(SimState& s) {
    const Operators& ops = *s.ops;
    const Reaction r = reaction_terms(s);
    const bool robin = !dirichlet(s);

    auto advance = [&](Species& sp, Field& x, const Field& reaction, const Field& source) -> int {
        Vector rhs = ops.mass.cwiseProduct(x + dt_ * (reaction + source));
        if (robin && sp.background != 0.0) {
            rhs += (dt_ * sp.mu * sp.h * sp.background) * ops.boundary_load;
        }
        Vector b;
        Vector guess;
        if (robin) {
            b = std::move(rhs);
            guess = x;
        } else {
            const auto nf = static_cast<Eigen::Index>(sp.free_nodes.size());
            b.resize(nf);
            guess.resize(nf);
            for (Eigen::Index k = 0; k < nf; ++k) {
                b[k] = rhs[sp.free_nodes[static_cast<std::size_t>(k)]];
                guess[k] = x[sp.free_nodes[static_cast<std::size_t>(k)]];
            }
            b += sp.lift;
        }
        Vector solution;
        int iterations = 0;
        if (solver_ == LinearSolverKind::cholesky) {
            solution = sp.cholesky.solve(b);
        } else {
            solution = sp.cg.solveWithGuess(b, guess);
            iterations = static_cast<int>(sp.cg.iterations());
            if (sp.cg.info() != Eigen::Success) {
                std::ostringstream msg;
                msg << "CG did not reach relative residual 1e-10 at t=" << s.t << " ("
                    << sp.cg.iterations() << " iterations, residual " << sp.cg.error() << ")";
                throw ConvergenceError(msg.str(), {sp.cg.error()});
            }
        }
        if (robin) {
            x = std::move(solution);
        } else {
            for (std::size_t k = 0; k < sp.free_nodes.size(); ++k) {
                x[sp.free_nodes[k]] = solution[static_cast<Eigen::Index>(k)];
            }
        }
        return iterations;
    };

    last_iterations_.first = advance(*u_, s.u, r.ru, s.f);
    last_iterations_.second = advance(*v_, s.v, r.rv, s.g);
    s.t += dt_;
    pin_boundary(s);
    check_finite(s);
}

void step_imex(SimState& state, double dt, LinearSolverKind solver) {
    ImexStepper stepper(state, dt, solver);
    stepper.step(state);
}

void apply_event(SimState& state, EventAction action) {
    switch (action) {
        case EventAction::zero_source_f:
            state.f.setZero();
            break;
    }
}

void Schedule::validate() const {
    if (!(dt > 0.0)) throw InvalidArgument("schedule: dt must be positive");
    if (!(t_end > 0.0)) throw InvalidArgument("schedule: t_end must be positive");
    if (diagnostics_every < 1) throw InvalidArgument("schedule: diagnostics_every must be >= 1");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
        throw InvalidArgument("schedule: snapshot times must be sorted");
    }
    for (double t : snapshot_times) {
        if (t < 0.0 || t > t_end * (1.0 + 1e-12)) {
            throw InvalidArgument("schedule: snapshot times must lie in [0, t_end]");
        }
    }
    for (const Event& e : events) {
        if (e.time < 0.0 || e.time > t_end * (1.0 + 1e-12)) {
            throw InvalidArgument("schedule: event times must lie in [0, t_end]");
        }
    }
}

std::vector<double> log_spaced_times(double t_min, double t_end, int count) {
    if (!(t_min > 0.0) || !(t_end > t_min) || count < 2) {
        throw InvalidArgument("log_spaced_times: need 0 < t_min < t_end and count >= 2");
    }
    std::vector<double> out{0.0};
    const double ratio = std::log(t_end / t_min);
    for (int i = 0; i < count; ++i) {
        const double t = i == count - 1 ? t_end : t_min * std::exp(ratio * i / (count - 1));
        out.push_back(t);
    }
    return out;
}

namespace {

long long step_index(double t, double dt, const char* what, std::vector<std::string>& warnings) {
    const double steps = t / dt;
    const long long k = std::llround(steps);
    if (std::abs(steps - static_cast<double>(k)) > 1e-6) {
        std::ostringstream msg;
        msg << what << " time " << t << " is not a multiple of dt=" << dt << "; snapped to "
            << static_cast<double>(k) * dt;
        warnings.push_back(msg.str());
    }
    return k;
}

}  // namespace

Trajectory run(SimState state, const Schedule& schedule, const RunOptions& options) {
    schedule.validate();
    const double dt = schedule.dt;
    Trajectory traj;
    traj.dt = dt;
    const long long n_steps = step_index(schedule.t_end, dt, "t_end", traj.warnings);
    traj.t_end = static_cast<double>(n_steps) * dt;

    std::vector<long long> snapshot_steps;
    for (double t : schedule.snapshot_times) {
        snapshot_steps.push_back(step_index(t, dt, "snapshot", traj.warnings));
    }
    std::vector<std::pair<long long, EventAction>> events;
    for (const Event& e : schedule.events) {
        events.emplace_back(step_index(e.time, dt, "event", traj.warnings), e.action);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });

    std::optional<ImexStepper> imex;
    if (options.integrator == Integrator::imex) {
        imex.emplace(state, dt, options.linear_solver);
    } else {
        const double limit = explicit_stable_dt(state);
        if (dt > limit) {
            std::ostringstream msg;
            msg << "explicit step dt=" << dt << " exceeds the stability bound " << limit;
            throw InvalidArgument(msg.str());
        }
    }

    const int n_bins = options.n_bins > 0 ? options.n_bins : ring_aligned_bins(*state.mesh);
    const RadialBinning bins = make_radial_binning(*state.mesh, n_bins);
    const Operators& ops = *state.ops;

    auto record_diagnostics = [&](const SimState& s) {
        Diagnostics d;
        d.t = s.t;
        d.u_min = s.u.minCoeff();
        d.u_max = s.u.maxCoeff();
        d.v_min = s.v.minCoeff();
        d.v_max = s.v.maxCoeff();
        d.l2_u = l2_norm(ops, s.u);
        d.l2_v = l2_norm(ops, s.v);
        const RateNorms rates = time_derivative_norms(s);
        d.ut_l2 = rates.u;
        d.vt_l2 = rates.v;
        const double gu = h1_seminorm(ops, s.u);
        const double gv = h1_seminorm(ops, s.v);
        d.grad_l2 = std::sqrt(gu * gu + gv * gv);
        d.asymmetry = asymmetry_index(bins, s.u);
        traj.timeseries.push_back(d);
    };

    std::size_t next_snapshot = 0;
    std::size_t next_event = 0;
    traj.min_u = state.u.minCoeff();
    traj.min_v = state.v.minCoeff();
    traj.step_times.reserve(static_cast<std::size_t>(n_steps));
    traj.step_changes.reserve(static_cast<std::size_t>(n_steps));

    for (long long k = 0;; ++k) {
        while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] <= k) {
            traj.snapshots.push_back({state.t, state.u, state.v});
            ++next_snapshot;
        }
        if (k % schedule.diagnostics_every == 0 || k == n_steps) record_diagnostics(state);
        if (k == n_steps) break;
        while (next_event < events.size() && events[next_event].first <= k) {
            apply_event(state, events[next_event].second);
            ++next_event;
        }

        const Field u_old = state.u;
        const Field v_old = state.v;
        const double t_old = state.t;
        if (imex) {
            imex->step(state);
        } else {
            step_explicit(state, dt);
        }
        // Step count drives time; avoids accumulating round-off in t.
        state.t = static_cast<double>(k + 1) * dt;
        traj.step_times.push_back(t_old);
        traj.step_changes.push_back(std::max((state.u - u_old).lpNorm<Eigen::Infinity>(),
                                             (state.v - v_old).lpNorm<Eigen::Infinity>()));
        traj.min_u = std::min(traj.min_u, state.u.minCoeff());
        traj.min_v = std::min(traj.min_v, state.v.minCoeff());
    }

    traj.steady_state_time = detect_steady(traj.step_times, traj.step_changes, dt, traj.t_end,
                                           options.steady_window, options.steady_threshold);
    traj.final_state = std::move(state);
    return traj;
}

std::optional<double> detect_steady(const std::vector<double>& step_times,
                                    const std::vector<double>& step_changes, double dt, double t_end,
                                    double window, double threshold) {
    const std::size_t n = std::min(step_times.size(), step_changes.size());
    if (n == 0) return std::nullopt;
    // next_violation[k]: first index >= k whose change reaches the threshold.
    std::vector<std::size_t> next_violation(n + 1, n);
    for (std::size_t k = n; k-- > 0;) {
        next_violation[k] = step_changes[k] >= threshold ? k : next_violation[k + 1];
    }
    const double slack = 1e-9 * std::max(1.0, t_end);
    for (std::size_t k = 0; k < n; ++k) {
        const double start = step_times[k];
        if (start + window > t_end + slack) break;
        const std::size_t v = next_violation[k];
        // Steps starting before start + window belong to the window.
        if (v == n || step_times[v] >= start + window - 0.5 * dt) return start;
    }
    return std::nullopt;
}

std::optional<double> detect_steady(const Trajectory& trajectory, double window, double threshold) {
    return detect_steady(trajectory.step_times, trajectory.step_changes, trajectory.dt,
                         trajectory.t_end, window, threshold);
}

}  // namespace gmrd
