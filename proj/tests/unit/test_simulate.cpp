#include <gtest/gtest.h>

#include <cmath>

#include "gmrd/analysis.hpp"
#include "gmrd/errors.hpp"
#include "gmrd/simulate.hpp"

using namespace gmrd;

namespace {

KineticsParams bmp4() { return {77.76, 77.76, 77.76, 77.76, 3.8, 19.0, 172.8, 172.8, 3.0}; }
KineticsParams wnt() { return {77.76, 194.4, 194.4, 97.2, 3.8, 19.0, 172.8, 172.8, 0.0}; }

std::shared_ptr<const Mesh> coarse() {
    static const auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, 0.1));
    return mesh;
}

const SourceSpec kRing = SourceSpec::radial_step(0.0, 670.0, 0.85);

}  // namespace

TEST(InitState, Presets) {
    const SimState s = init_state(coarse(), bmp4(), 3.0, 0.0, BoundaryMode::robin());
    EXPECT_TRUE((s.u.array() == 3.0).all());
    EXPECT_TRUE(s.v.isZero());
    EXPECT_TRUE(s.f.isZero());
    EXPECT_EQ(s.t, 0.0);
    const SimState w = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    EXPECT_TRUE(w.u.isZero());
    EXPECT_EQ(w.f.maxCoeff(), 670.0);
}

TEST(InitState, RejectsBadData) {
    EXPECT_THROW(init_state(coarse(), bmp4(), -1.0, 0.0, BoundaryMode::robin()), InvalidArgument);
    Field u = Field::Zero(static_cast<Eigen::Index>(coarse()->n_nodes()));
    u[3] = -1e-3;
    EXPECT_THROW(init_state(coarse(), bmp4(), u, 0.0, BoundaryMode::robin()), InvalidArgument);
    EXPECT_THROW(init_state(coarse(), bmp4(), Field::Zero(4), 0.0, BoundaryMode::robin()), InvalidArgument);
    // Dirichlet data must agree with the initial values on the boundary.
    EXPECT_THROW(init_state(coarse(), bmp4(), 3.0, 0.0, BoundaryMode::dirichlet(0.0, 0.0)), InvalidArgument);
    EXPECT_NO_THROW(init_state(coarse(), bmp4(), 0.0, 0.0, BoundaryMode::dirichlet(0.0, 0.0)));
}

TEST(StepExplicit, ZeroStateStaysZero) {
    KineticsParams p = wnt();
    SimState s = init_state(coarse(), p, 0.0, 0.0, BoundaryMode::robin());
    for (int k = 0; k < 10; ++k) step_explicit(s, 1e-5);
    EXPECT_TRUE(s.u.isZero());
    EXPECT_TRUE(s.v.isZero());
    EXPECT_NEAR(s.t, 1e-4, 1e-18);
}

TEST(StepExplicit, Bmp4FirstStepByHand) {
    const KineticsParams p = bmp4();
    SimState s = init_state(coarse(), p, 3.0, 0.0, BoundaryMode::robin());
    const double dt = 1e-6;
    step_explicit(s, dt);
    // Constant u = u_bar: diffusion and Robin flux vanish, only the reaction acts.
    const double u1 = 3.0 + dt * (-3.0 * p.a + 9.0 * p.b);
    const double v1 = dt * 9.0 * p.d;
    for (Eigen::Index i = 0; i < s.u.size(); ++i) {
        EXPECT_NEAR(s.u[i], u1, 1e-12);
        EXPECT_NEAR(s.v[i], v1, 1e-12);
    }
}

TEST(StepExplicit, PureDecayMatchesScalarOde) {
    // No-flux boundary and constant data: the reaction is the only term.
    KineticsParams p{2.0, 1e-300, 3.0, 1e-300, 1.0, 1.0, 0.0, 0.0, 0.0};
    for (double dt : {1e-3, 1e-4}) {
        SimState s = init_state(coarse(), p, 1.5, 0.5, BoundaryMode::robin());
        const int n = static_cast<int>(std::lround(0.5 / dt));
        for (int k = 0; k < n; ++k) step_explicit(s, dt);
        const double discrete = 1.5 * std::pow(1.0 - p.a * dt, n);
        EXPECT_NEAR(s.u.mean(), discrete, 1e-12);
        EXPECT_NEAR(s.u.mean(), 1.5 * std::exp(-p.a * 0.5), 2.0 * p.a * p.a * dt);
        EXPECT_NEAR(s.v.mean(), 0.5 * std::exp(-p.c * 0.5), 2.0 * p.c * p.c * dt);
    }
}

TEST(StepExplicit, DirichletPinsBoundary) {
    KineticsParams p = bmp4();
    p.mu_v = p.mu_u;
    SimState s = init_state(coarse(), p, 0.0, 0.0, BoundaryMode::dirichlet(0.0, 0.0), kRing);
    for (int k = 0; k < 20; ++k) step_explicit(s, 1e-5);
    for (int i : coarse()->boundary_nodes()) {
        EXPECT_EQ(s.u[i], 0.0);
        EXPECT_EQ(s.v[i], 0.0);
    }
    EXPECT_GT(s.u.maxCoeff(), 0.0);
}

TEST(StepExplicit, StableDtBound) {
    const SimState s = init_state(coarse(), bmp4(), 3.0, 0.0, BoundaryMode::robin());
    const double bound = explicit_stable_dt(s);
    EXPECT_GT(bound, 0.0);
    EXPECT_LT(bound, 1e-2);
    Schedule sched;
    sched.dt = 2.0 * bound;
    sched.t_end = 100.0 * sched.dt;
    RunOptions opts;
    opts.integrator = Integrator::explicit_euler;
    EXPECT_THROW(run(s, sched, opts), InvalidArgument);
}

TEST(StepExplicit, NonFiniteStateIsReported) {
    KineticsParams p = bmp4();
    SimState s = init_state(coarse(), p, 3.0, 0.0, BoundaryMode::robin());
    s.u[5] = std::nan("");
    try {
        step_explicit(s, 1e-6);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.time(), 0.0);
    }
}

TEST(StepImex, SolversAgree) {
    SimState a = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    SimState b = a;
    ImexStepper chol(a, 1e-3, LinearSolverKind::cholesky);
    ImexStepper cg(b, 1e-3, LinearSolverKind::cg);
    for (int k = 0; k < 20; ++k) {
        chol.step(a);
        cg.step(b);
    }
    EXPECT_GT(cg.last_iterations().first, 0);
    EXPECT_LT((a.u - b.u).lpNorm<Eigen::Infinity>(), 1e-7 * a.u.lpNorm<Eigen::Infinity>());
    EXPECT_LT((a.v - b.v).lpNorm<Eigen::Infinity>(), 1e-7 * a.v.lpNorm<Eigen::Infinity>());
}

TEST(StepImex, HeatEnergyNonIncreasing) {
    KineticsParams p{1e-300, 1e-300, 1e-300, 1e-300, 1.0, 2.0, 5.0, 5.0, 0.0};
    Field u0(static_cast<Eigen::Index>(coarse()->n_nodes()));
    for (std::size_t i = 0; i < coarse()->n_nodes(); ++i) {
        const Point& q = coarse()->nodes()[i];
        u0[static_cast<Eigen::Index>(i)] = 1.0 + std::cos(3.0 * q.x) * std::sin(2.0 * q.y + 1.0);
    }
    SimState s = init_state(coarse(), p, u0, u0, BoundaryMode::robin());
    ImexStepper stepper(s, 1e-3);
    double prev = l2_norm(*s.ops, s.u);
    for (int k = 0; k < 50; ++k) {
        stepper.step(s);
        const double e = l2_norm(*s.ops, s.u);
        EXPECT_LE(e, prev * (1.0 + 1e-14));
        prev = e;
    }
}

TEST(StepImex, ConvergesToExplicitAtFirstOrder) {
    const SimState s0 = init_state(coarse(), bmp4(), 3.0, 0.0, BoundaryMode::robin());
    const double horizon = 0.01;
    auto diff = [&](double dt) {
        SimState e = s0;
        SimState i = s0;
        ImexStepper stepper(i, dt);
        const int n = static_cast<int>(std::lround(horizon / dt));
        for (int k = 0; k < n; ++k) {
            step_explicit(e, dt);
            stepper.step(i);
        }
        return (e.u - i.u).lpNorm<Eigen::Infinity>();
    };
    const SimState probe = s0;
    const double dt1 = std::min(1e-5, 0.5 * explicit_stable_dt(probe));
    const double d1 = diff(dt1);
    const double d2 = diff(dt1 / 4.0);
    EXPECT_GT(d1, 0.0);
    EXPECT_NEAR(d1 / d2, 4.0, 0.6);
}

TEST(Events, ZeroSourceAction) {
    SimState s = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    apply_event(s, EventAction::zero_source_f);
    EXPECT_TRUE(s.f.isZero());
}

TEST(Schedule, Validation) {
    Schedule s;
    EXPECT_NO_THROW(s.validate());
    s.dt = 0.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = Schedule{};
    s.snapshot_times = {0.5, 0.1};
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = Schedule{};
    s.snapshot_times = {4.0};
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = Schedule{};
    s.events = {{-1.0, EventAction::zero_source_f}};
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Schedule, LogSpacedTimes) {
    const auto t = log_spaced_times(1e-3, 3.0, 5);
    ASSERT_EQ(t.size(), 6u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 3.0);
    for (std::size_t k = 2; k < t.size(); ++k) EXPECT_NEAR(t[k] / t[k - 1], t[2] / t[1], 1e-9);
}

TEST(Run, SnapshotsEventsAndDiagnostics) {
    SimState s = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    Schedule sched;
    sched.dt = 1e-3;
    sched.t_end = 0.05;
    sched.snapshot_times = {0.0, 0.01, 0.0205, 0.05};
    sched.events = {{0.02, EventAction::zero_source_f}};
    sched.diagnostics_every = 5;
    const Trajectory tr = run(s, sched);
    ASSERT_EQ(tr.snapshots.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(tr.snapshots[k].t, sched.snapshot_times[k], 0.5 * sched.dt + 1e-12);
    }
    EXPECT_FALSE(tr.warnings.empty());
    EXPECT_EQ(tr.step_changes.size(), 50u);
    EXPECT_EQ(tr.timeseries.size(), 11u);
    EXPECT_NEAR(tr.timeseries.back().t, 0.05, 1e-12);
    EXPECT_TRUE(tr.final_state.f.isZero());
    EXPECT_GE(tr.min_u, -1e-12);
    EXPECT_GE(tr.min_v, -1e-12);
    for (std::size_t k = 1; k < tr.timeseries.size(); ++k) {
        EXPECT_GT(tr.timeseries[k].t, tr.timeseries[k - 1].t);
    }
}

TEST(Run, EventAtEndNeverFires) {
    SimState s = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    Schedule a;
    a.dt = 1e-3;
    a.t_end = 0.02;
    Schedule b = a;
    b.events = {{0.02, EventAction::zero_source_f}};
    const Trajectory ta = run(s, a);
    const Trajectory tb = run(s, b);
    EXPECT_EQ((ta.final_state.u - tb.final_state.u).lpNorm<Eigen::Infinity>(), 0.0);
    EXPECT_FALSE(tb.final_state.f.isZero());
}

TEST(DetectSteady, SyntheticChanges) {
    const double dt = 0.1;
    std::vector<double> t;
    std::vector<double> c;
    for (int k = 0; k < 40; ++k) {
        t.push_back(k * dt);
        c.push_back(k < 12 ? 1e-3 : 1e-8);
    }
    const auto hit = detect_steady(t, c, dt, 4.0, 1.0, 1e-6);
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(*hit, 1.2, 1e-12);
    // A late spike voids every window containing it.
    c[15] = 1.0;
    const auto late = detect_steady(t, c, dt, 4.0, 1.0, 1e-6);
    ASSERT_TRUE(late.has_value());
    EXPECT_NEAR(*late, 1.6, 1e-12) << "window must start after the spike";
    EXPECT_FALSE(detect_steady(t, c, dt, 4.0, 3.5, 1e-6).has_value());
}

TEST(DetectSteady, PureDecayRun) {
    KineticsParams p{20.0, 1e-300, 20.0, 1e-300, 1.0, 1.0, 0.0, 0.0, 0.0};
    SimState s = init_state(coarse(), p, 1.0, 1.0, BoundaryMode::robin());
    Schedule sched;
    sched.dt = 1e-3;
    sched.t_end = 2.0;
    sched.diagnostics_every = 100;
    const Trajectory tr = run(s, sched);
    ASSERT_TRUE(tr.steady_state_time.has_value());
    // Per-step change 20 dt e^{-20 t} drops below 1e-6 near t = 0.49.
    EXPECT_NEAR(*tr.steady_state_time, std::log(20.0 * 1e-3 / 1e-6) / 20.0, 0.01);
}
