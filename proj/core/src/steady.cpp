#include "gmrd/steady.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "gmrd/errors.hpp"

namespace gmrd {

double stationary_residual(const SimState& state) {
    const TimeDerivative r = semi_discrete_rhs(state);
    const Vector& m = state.ops->mass;
    return std::sqrt(r.du.dot(m.cwiseProduct(r.du)) + r.dv.dot(m.cwiseProduct(r.dv)));
}

namespace {

using Triplet = Eigen::Triplet<double>;

void append(std::vector<Triplet>& out, const SparseOperator& op, double scale, Eigen::Index row0,
            Eigen::Index col0, const std::vector<char>& pinned) {
    for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
        for (SparseOperator::InnerIterator it(op, col); it; ++it) {
            if (pinned[static_cast<std::size_t>(it.row())]) continue;
            out.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
        }
    }
}

}  // namespace

SteadyState solve_steady_newton(const SimState& initial, const NewtonOptions& options) {
    SimState s = initial;
    const Operators& ops = *s.ops;
    const KineticsParams& p = s.params;
    const auto n = static_cast<Eigen::Index>(s.n());
    const bool dirichlet = s.boundary.kind == BoundaryKind::dirichlet;

    std::vector<char> pinned(static_cast<std::size_t>(n), 0);
    if (dirichlet) {
        for (int i : s.mesh->boundary_nodes()) {
            pinned[static_cast<std::size_t>(i)] = 1;
            s.u[i] = s.boundary.u_b;
            s.v[i] = s.boundary.v_b;
        }
    }

    SparseOperator diffusion_u = ops.stiffness;
    SparseOperator diffusion_v = ops.stiffness;
    if (!dirichlet) {
        diffusion_u += p.h_u * ops.boundary;
        diffusion_v += p.h_v * ops.boundary;
    }

    auto m_norm = [&](const Vector& x) { return std::sqrt(x.dot(ops.mass.cwiseProduct(x))); };

    SteadyState out;
    out.residuals.push_back(stationary_residual(s));
    bool small_step = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (out.residuals.back() < options.tolerance || small_step) {
            out.u = s.u;
            out.v = s.v;
            out.iterations = it;
            return out;
        }
        // Mass-weighted residual G = M F and its Jacobian.
        const TimeDerivative f = semi_discrete_rhs(s);
        Vector g(2 * n);
        g.head(n) = ops.mass.cwiseProduct(f.du);
        g.tail(n) = ops.mass.cwiseProduct(f.dv);

        std::vector<Triplet> entries;
        entries.reserve(static_cast<std::size_t>(2 * (diffusion_u.nonZeros() + 2 * n)));
        append(entries, diffusion_u, -p.mu_u, 0, 0, pinned);
        append(entries, diffusion_v, -p.mu_v, n, n, pinned);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (pinned[static_cast<std::size_t>(i)]) {
                entries.emplace_back(i, i, 1.0);
                entries.emplace_back(n + i, n + i, 1.0);
                g[i] = 0.0;
                g[n + i] = 0.0;
                continue;
            }
            const Jacobian j = reaction_jacobian(s.u[i], s.v[i], p);
            const double m = ops.mass[i];
            entries.emplace_back(i, i, m * j[0][0]);
            entries.emplace_back(i, n + i, m * j[0][1]);
            entries.emplace_back(n + i, i, m * j[1][0]);
            entries.emplace_back(n + i, n + i, m * j[1][1]);
        }
        SparseOperator jac(2 * n, 2 * n);
        jac.setFromTriplets(entries.begin(), entries.end());
        jac.makeCompressed();

        Eigen::SparseLU<SparseOperator> lu;
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            throw ConvergenceError("Newton: singular Jacobian", out.residuals);
        }
        const Vector delta = lu.solve(-g);
        if (lu.info() != Eigen::Success || !delta.allFinite()) {
            throw ConvergenceError("Newton: linear solve failed", out.residuals);
        }
        s.u += delta.head(n);
        s.v += delta.tail(n);
        const double step = std::hypot(m_norm(delta.head(n)), m_norm(delta.tail(n)));
        small_step = step <= options.step_tolerance * (1.0 + std::hypot(m_norm(s.u), m_norm(s.v)));
        if ((s.v.array() <= -1.0).any()) {
            throw ConvergenceError("Newton: iterate left the domain v > -1", out.residuals);
        }
        out.residuals.push_back(stationary_residual(s));
        if (!std::isfinite(out.residuals.back())) {
            throw ConvergenceError("Newton: residual became non-finite", out.residuals);
        }
    }
    if (out.residuals.back() < options.tolerance || small_step) {
        out.u = s.u;
        out.v = s.v;
        out.iterations = options.max_iterations;
        return out;
    }
    std::ostringstream msg;
    msg << "Newton did not converge in " << options.max_iterations << " iterations (residual "
        << out.residuals.back() << ")";
    throw ConvergenceError(msg.str(), out.residuals);
}

}  // namespace gmrd
