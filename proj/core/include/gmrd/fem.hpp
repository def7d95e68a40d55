#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmrd/mesh.hpp"

namespace gmrd {

using Vector = Eigen::VectorXd;
using SparseOperator = Eigen::SparseMatrix<double>;
// Nodal values of a scalar P1 function.
using Field = Eigen::VectorXd;

// Global P1 stiffness matrix K_ij = \int grad(phi_i) . grad(phi_j).
SparseOperator assemble_stiffness(const Mesh& mesh);

// Mass matrix. The lumped variant is diagonal with entries area/3 summed
// over adjacent triangles (row sums of the consistent matrix).
SparseOperator assemble_mass(const Mesh& mesh, bool lumped = true);
// Diagonal of the lumped mass matrix as a vector.
Vector lumped_mass_diagonal(const Mesh& mesh);

struct BoundaryOperator {
    SparseOperator mass;   // B_ij = \int_{dOmega} phi_i phi_j (lumped: diagonal)
    Vector load;           // l_i = \int_{dOmega} phi_i
};

// Robin boundary mass and load. Throws InvalidArgument on an empty boundary.
BoundaryOperator assemble_boundary_mass(const Mesh& mesh, bool lumped = true);

// Piecewise-radial source: value(x) = outer if |x| >= radius else inner.
// radius = 0 gives the constant `outer`.
struct SourceSpec {
    double inner = 0.0;
    double outer = 0.0;
    double radius = 0.0;

    static SourceSpec constant(double value) { return {value, value, 0.0}; }
    static SourceSpec radial_step(double inner, double outer, double radius) {
        return {inner, outer, radius};
    }
    bool is_zero() const { return inner == 0.0 && outer == 0.0; }
    double operator()(const Point& p) const;
    std::string describe() const;
};

struct SourceField {
    Field values;
    std::string support;
};

// Nodal interpolation; nodes exactly on |x| = radius take the outer value.
// Negative values are rejected.
SourceField project_source(const Mesh& mesh, const SourceSpec& spec);
SourceField project_source(const Mesh& mesh, const std::function<double(const Point&)>& fn,
                           std::string support);
SourceField zero_source(const Mesh& mesh);

// System restricted to the unconstrained nodes after eliminating Dirichlet
// values. A_ff stays symmetric when the input operator is.
struct ConstrainedSystem {
    SparseOperator matrix;          // A_ff
    Vector rhs;                     // b_f - A_fc g_c
    std::vector<int> free_nodes;    // full index of each reduced unknown
    Vector constrained_values;      // full-length: g on constrained nodes, 0 elsewhere
    std::vector<char> is_constrained;

    // Reduced solution -> full nodal vector with the boundary values inserted.
    Vector expand(const Vector& reduced) const;
};

// Eliminates the constrained rows/columns. `values` is full-length; only the
// entries at `nodes` are used. Every entry of `nodes` must be a boundary node.
ConstrainedSystem apply_dirichlet(const SparseOperator& system, const Vector& rhs, const Mesh& mesh,
                                  const std::vector<int>& nodes, const Vector& values);
// Convenience: constrain all boundary nodes.
ConstrainedSystem apply_dirichlet(const SparseOperator& system, const Vector& rhs, const Mesh& mesh,
                                  const Vector& boundary_values);

// Coordinate "row col value" dump for debugging.
void write_coo(std::ostream& os, const SparseOperator& op);

}  // namespace gmrd
