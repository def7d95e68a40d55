#include "gmrd/fem.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "gmrd/errors.hpp"

namespace gmrd {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseOperator from_triplets(std::size_t n, const Triplets& triplets) {
    SparseOperator op(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.setFromTriplets(triplets.begin(), triplets.end());
    op.makeCompressed();
    return op;
}

}  // namespace

SparseOperator assemble_stiffness(const Mesh& mesh) {
    const auto& nodes = mesh.nodes();
    Triplets triplets;
    triplets.reserve(mesh.n_triangles() * 9);
    for (const Triangle& tri : mesh.triangles()) {
        const Point& p0 = nodes[tri[0]];
        const Point& p1 = nodes[tri[1]];
        const Point& p2 = nodes[tri[2]];
        const double area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
        // grad(phi_i) = (b_i, c_i) / (2 area)
        const double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        const double scale = 1.0 / (4.0 * area);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                triplets.emplace_back(tri[i], tri[j], scale * (b[i] * b[j] + c[i] * c[j]));
            }
        }
    }
    return from_triplets(mesh.n_nodes(), triplets);
}

Vector lumped_mass_diagonal(const Mesh& mesh) {
    Vector diag = Vector::Zero(static_cast<Eigen::Index>(mesh.n_nodes()));
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const double third = mesh.triangle_area(t) / 3.0;
        for (int v : mesh.triangles()[t]) diag[v] += third;
    }
    return diag;
}

SparseOperator assemble_mass(const Mesh& mesh, bool lumped) {
    Triplets triplets;
    if (lumped) {
        const Vector diag = lumped_mass_diagonal(mesh);
        triplets.reserve(mesh.n_nodes());
        for (Eigen::Index i = 0; i < diag.size(); ++i) triplets.emplace_back(i, i, diag[i]);
        return from_triplets(mesh.n_nodes(), triplets);
    }
    triplets.reserve(mesh.n_triangles() * 9);
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const Triangle& tri = mesh.triangles()[t];
        const double a12 = mesh.triangle_area(t) / 12.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], i == j ? 2.0 * a12 : a12);
        }
    }
    return from_triplets(mesh.n_nodes(), triplets);
}

BoundaryOperator assemble_boundary_mass(const Mesh& mesh, bool lumped) {
    if (mesh.boundary_edges().empty()) {
        throw InvalidArgument("Robin boundary terms need a mesh with boundary edges");
    }
    const auto& nodes = mesh.nodes();
    BoundaryOperator out;
    out.load = Vector::Zero(static_cast<Eigen::Index>(mesh.n_nodes()));
    Triplets triplets;
    triplets.reserve(mesh.boundary_edges().size() * 4);
    for (const Edge& e : mesh.boundary_edges()) {
        const double length = std::hypot(nodes[e[0]].x - nodes[e[1]].x, nodes[e[0]].y - nodes[e[1]].y);
        out.load[e[0]] += 0.5 * length;
        out.load[e[1]] += 0.5 * length;
        if (lumped) {
            triplets.emplace_back(e[0], e[0], 0.5 * length);
            triplets.emplace_back(e[1], e[1], 0.5 * length);
        } else {
            triplets.emplace_back(e[0], e[0], length / 3.0);
            triplets.emplace_back(e[1], e[1], length / 3.0);
            triplets.emplace_back(e[0], e[1], length / 6.0);
            triplets.emplace_back(e[1], e[0], length / 6.0);
        }
    }
    out.mass = from_triplets(mesh.n_nodes(), triplets);
    return out;
}

double SourceSpec::operator()(const Point& p) const {
    if (radius <= 0.0) return outer;
    return std::hypot(p.x, p.y) >= radius ? outer : inner;
}

std::string SourceSpec::describe() const {
    std::ostringstream os;
    if (radius <= 0.0 || inner == outer) {
        os << "constant " << outer;
    } else {
        os << outer << " for |x| >= " << radius << ", " << inner << " inside";
    }
    return os.str();
}

SourceField project_source(const Mesh& mesh, const std::function<double(const Point&)>& fn,
                           std::string support) {
    SourceField out;
    out.support = std::move(support);
    out.values.resize(static_cast<Eigen::Index>(mesh.n_nodes()));
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        const double value = fn(mesh.nodes()[i]);
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw InvalidArgument("source values must be finite and non-negative");
        }
        out.values[static_cast<Eigen::Index>(i)] = value;
    }
    return out;
}

SourceField project_source(const Mesh& mesh, const SourceSpec& spec) {
    if (spec.inner < 0.0 || spec.outer < 0.0) {
        throw InvalidArgument("source values must be non-negative");
    }
    return project_source(mesh, [&spec](const Point& p) { return spec(p); }, spec.describe());
}

SourceField zero_source(const Mesh& mesh) {
    return {Field::Zero(static_cast<Eigen::Index>(mesh.n_nodes())), "none"};
}

Vector ConstrainedSystem::expand(const Vector& reduced) const {
    Vector full = constrained_values;
    for (std::size_t i = 0; i < free_nodes.size(); ++i) {
        full[free_nodes[i]] = reduced[static_cast<Eigen::Index>(i)];
    }
    return full;
}

ConstrainedSystem apply_dirichlet(const SparseOperator& system, const Vector& rhs, const Mesh& mesh,
                                  const std::vector<int>& nodes, const Vector& values) {
    const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
    if (system.rows() != n || system.cols() != n || rhs.size() != n || values.size() != n) {
        throw InvalidArgument("apply_dirichlet: operator, rhs and values must match the mesh size");
    }
    ConstrainedSystem out;
    out.is_constrained.assign(static_cast<std::size_t>(n), 0);
    out.constrained_values = Vector::Zero(n);
    for (int i : nodes) {
        if (i < 0 || i >= n || !mesh.is_boundary_node(i)) {
            throw InvalidArgument("Dirichlet values given at non-boundary node " + std::to_string(i));
        }
        out.is_constrained[static_cast<std::size_t>(i)] = 1;
        out.constrained_values[i] = values[i];
    }
    std::vector<int> reduced_index(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!out.is_constrained[static_cast<std::size_t>(i)]) {
            reduced_index[static_cast<std::size_t>(i)] = static_cast<int>(out.free_nodes.size());
            out.free_nodes.push_back(static_cast<int>(i));
        }
    }
    const auto nf = static_cast<Eigen::Index>(out.free_nodes.size());
    out.rhs.resize(nf);
    for (Eigen::Index r = 0; r < nf; ++r) out.rhs[r] = rhs[out.free_nodes[static_cast<std::size_t>(r)]];

    Triplets triplets;
    triplets.reserve(static_cast<std::size_t>(system.nonZeros()));
    for (Eigen::Index col = 0; col < system.outerSize(); ++col) {
        for (SparseOperator::InnerIterator it(system, col); it; ++it) {
            const int rf = reduced_index[static_cast<std::size_t>(it.row())];
            if (rf < 0) continue;
            const int cf = reduced_index[static_cast<std::size_t>(it.col())];
            if (cf >= 0) {
                triplets.emplace_back(rf, cf, it.value());
            } else {
                out.rhs[rf] -= it.value() * out.constrained_values[it.col()];
            }
        }
    }
    out.matrix.resize(nf, nf);
    out.matrix.setFromTriplets(triplets.begin(), triplets.end());
    out.matrix.makeCompressed();
    return out;
}

ConstrainedSystem apply_dirichlet(const SparseOperator& system, const Vector& rhs, const Mesh& mesh,
                                  const Vector& boundary_values) {
    return apply_dirichlet(system, rhs, mesh, mesh.boundary_nodes(), boundary_values);
}

void write_coo(std::ostream& os, const SparseOperator& op) {
    os.precision(17);
    for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
        for (SparseOperator::InnerIterator it(op, col); it; ++it) {
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

}  // namespace gmrd
