#include <gtest/gtest.h>

#include "gmrd/analysis.hpp"
#include "gmrd/errors.hpp"
#include "gmrd/steady.hpp"

using namespace gmrd;

namespace {

std::shared_ptr<const Mesh> coarse() {
    static const auto mesh = std::make_shared<const Mesh>(build_disk_mesh(1.0, 0.1));
    return mesh;
}

KineticsParams bmp4() { return {77.76, 77.76, 77.76, 77.76, 3.8, 19.0, 172.8, 172.8, 3.0}; }
KineticsParams wnt() { return {77.76, 194.4, 194.4, 97.2, 3.8, 19.0, 172.8, 172.8, 0.0}; }
const SourceSpec kRing = SourceSpec::radial_step(0.0, 670.0, 0.85);

Trajectory march(const SimState& s, double t_end) {
    Schedule sched;
    sched.dt = 1e-3;
    sched.t_end = t_end;
    sched.diagnostics_every = 100;
    return run(s, sched);
}

}  // namespace

TEST(Newton, TrivialDirichletState) {
    KineticsParams p = bmp4();
    p.mu_v = p.mu_u;
    const SimState s = init_state(coarse(), p, 0.0, 0.0, BoundaryMode::dirichlet(0.0, 0.0));
    const SteadyState st = solve_steady_newton(s);
    EXPECT_EQ(st.iterations, 0);
    EXPECT_TRUE(st.u.isZero());
    EXPECT_TRUE(st.v.isZero());
}

TEST(Newton, MatchesTimeMarchedBmp4) {
    const SimState s0 = init_state(coarse(), bmp4(), 3.0, 0.0, BoundaryMode::robin());
    const Trajectory tr = march(s0, 1.0);
    const SteadyState st = solve_steady_newton(tr.final_state);
    EXPECT_LE(st.iterations, 5);
    EXPECT_LT(st.residuals.back(), 1e-10);
    EXPECT_LT(l2_norm(*s0.ops, st.u - tr.final_state.u) + l2_norm(*s0.ops, st.v - tr.final_state.v), 1e-6);
}

TEST(Newton, MatchesTimeMarchedWnt) {
    const SimState s0 = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    const Trajectory tr = march(s0, 1.5);
    const SteadyState st = solve_steady_newton(tr.final_state);
    EXPECT_GT(st.u.maxCoeff(), 1.0);
    EXPECT_LT(l2_norm(*s0.ops, st.u - tr.final_state.u) + l2_norm(*s0.ops, st.v - tr.final_state.v), 1e-5);
}

TEST(Newton, SteadyStateIsAFixedPointOfTheStepper) {
    const SimState s0 = init_state(coarse(), wnt(), 0.0, 0.0, BoundaryMode::robin(), kRing);
    const Trajectory tr = march(s0, 1.0);
    const SteadyState st = solve_steady_newton(tr.final_state);
    SimState s = tr.final_state;
    s.u = st.u;
    s.v = st.v;
    const RateNorms r = time_derivative_norms(s);
    EXPECT_LT(r.u, 1e-8);
    EXPECT_LT(r.v, 1e-8);
    const Field u_before = s.u;
    ImexStepper stepper(s, 1e-4);
    stepper.step(s);
    EXPECT_LT((s.u - u_before).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Newton, ReportsHistoryOnFailure) {
    const SimState s0 = init_state(coarse(), wnt(), 6.0, 0.0, BoundaryMode::robin(), kRing);
    NewtonOptions opts;
    opts.max_iterations = 1;
    try {
        solve_steady_newton(s0, opts);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GE(e.residuals().size(), 1u);
    }
}
