#pragma once

#include <vector>

#include "gmrd/simulate.hpp"

namespace gmrd {

struct NewtonOptions {
    double tolerance = 1e-10;  // on the M-norm of the stationary residual
    // Also converged once a Newton update is this small relative to the
    // iterate: the residual itself bottoms out at round-off of M^-1 K u.
    double step_tolerance = 1e-12;
    int max_iterations = 50;
};

struct SteadyState {
    Field u;
    Field v;
    int iterations = 0;
    std::vector<double> residuals;  // one entry per iterate, starting with the guess
};

// M-norm of the semi-discrete right-hand side for both species combined.
double stationary_residual(const SimState& state);

// Newton iteration on the coupled stationary system, started from state.u and
// state.v, using the operators, sources and boundary mode of `state`.
// Throws ConvergenceError with the residual history on failure.
SteadyState solve_steady_newton(const SimState& state, const NewtonOptions& options = {});

}  // namespace gmrd
