#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace gmrd {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

struct MeshQuality {
    double min_angle_deg = 0.0;
    double h_max = 0.0;
    double h_min = 0.0;
    std::size_t n_nodes = 0;
    std::size_t n_triangles = 0;
};

// Conforming triangulation of a simply-connected planar domain.
//
// Construction validates the topology: every triangle is counterclockwise
// with positive area, every edge is shared by one (boundary) or two
// (interior) triangles, and the supplied boundary edge list is exactly the
// set of edges owned by a single triangle. A Mesh is immutable afterwards.
class Mesh {
public:
    Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
         std::vector<Edge> boundary_edges, std::string domain_tag);

    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Edge>& boundary_edges() const noexcept { return boundary_edges_; }
    // Sorted, unique.
    const std::vector<int>& boundary_nodes() const noexcept { return boundary_nodes_; }
    bool is_boundary_node(int i) const { return on_boundary_[static_cast<std::size_t>(i)] != 0; }

    std::size_t n_nodes() const noexcept { return nodes_.size(); }
    std::size_t n_triangles() const noexcept { return triangles_.size(); }
    double h_max() const noexcept { return h_max_; }
    double h_min() const noexcept { return h_min_; }
    const std::string& domain_tag() const noexcept { return domain_tag_; }

    double triangle_area(std::size_t t) const;
    double total_area() const;
    double boundary_length() const;
    // Largest distance of a node from the origin.
    double outer_radius() const;

private:
    std::vector<Point> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> boundary_edges_;
    std::vector<int> boundary_nodes_;
    std::vector<char> on_boundary_;
    std::string domain_tag_;
    double h_max_ = 0.0;
    double h_min_ = 0.0;
};

struct DiskMeshOptions {
    // Generation refuses meshes whose node count would exceed this.
    std::size_t max_nodes = 2'000'000;
};

// Node count build_disk_mesh would produce, without allocating the mesh.
std::size_t estimate_disk_nodes(double radius, double target_h);

// Deterministic ring triangulation of the disk |x| <= radius.
//
// Rings are equally spaced in radius (spacing radius/N, N = ceil(radius/target_h)).
// Ring node counts are 6*2^j and only double at radius/2, radius/4, ..., so the
// outer half of the disk is an exactly periodic band: rings of equal count
// alternate by half an angular step. Boundary nodes lie on the circle.
// Throws InvalidArgument for bad inputs and ResourceError if the estimated
// node count exceeds options.max_nodes.
Mesh build_disk_mesh(double radius, double target_h, const DiskMeshOptions& options = {});

MeshQuality mesh_quality(const Mesh& mesh);

// Number of radial bins that puts every ring of a ring mesh into its own bin,
// or a spacing-based count for meshes without ring structure.
int ring_aligned_bins(const Mesh& mesh);

// Plain-text format:
//   nodes N triangles M boundary_edges K
//   x y            (N lines)
//   i j k          (M lines, 0-based)
//   i j            (K lines)
// Coordinates are written in shortest round-trip form, so write/read is
// bit-exact.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is, std::string domain_tag = "imported");
void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path, std::string domain_tag = "imported");

}  // namespace gmrd
