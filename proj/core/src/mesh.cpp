#include "gmrd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gmrd/errors.hpp"

namespace gmrd {

namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

bool is_disk_tag(const std::string& tag) { return tag == "unit_disk" || tag == "disk"; }

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
           std::vector<Edge> boundary_edges, std::string domain_tag)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      domain_tag_(std::move(domain_tag)) {
    const int n = static_cast<int>(nodes_.size());
    if (n < 3 || triangles_.empty()) {
        throw InvalidArgument("mesh needs at least 3 nodes and 1 triangle");
    }

    std::unordered_map<std::uint64_t, int> edge_use;
    edge_use.reserve(triangles_.size() * 3);
    h_max_ = 0.0;
    h_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const Triangle& tri = triangles_[t];
        for (int v : tri) {
            if (v < 0 || v >= n) {
                throw InvalidArgument("triangle " + std::to_string(t) + " has node index out of range");
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            throw InvalidArgument("triangle " + std::to_string(t) + " repeats a node");
        }
        const Point& a = nodes_[tri[0]];
        const Point& b = nodes_[tri[1]];
        const Point& c = nodes_[tri[2]];
        const double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
        const double longest = std::max({la, lb, lc});
        // Relative threshold: area below ~1e-12 of the edge-length square is degenerate.
        if (!(signed_area(a, b, c) > 1e-12 * longest * longest)) {
            throw InvalidArgument("triangle " + std::to_string(t) +
                                  " is degenerate or not counterclockwise");
        }
        h_max_ = std::max(h_max_, longest);
        h_min_ = std::min({h_min_, la, lb, lc});
        for (int e = 0; e < 3; ++e) {
            ++edge_use[edge_key(tri[e], tri[(e + 1) % 3])];
        }
    }

    std::set<std::uint64_t> single;
    for (const auto& [key, count] : edge_use) {
        if (count > 2) {
            throw InvalidArgument("edge shared by more than two triangles (non-manifold mesh)");
        }
        if (count == 1) single.insert(key);
    }
    std::set<std::uint64_t> given;
    for (const Edge& e : boundary_edges_) {
        if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n || e[0] == e[1]) {
            throw InvalidArgument("invalid boundary edge");
        }
        if (!given.insert(edge_key(e[0], e[1])).second) {
            throw InvalidArgument("duplicate boundary edge");
        }
    }
    if (given != single) {
        throw InvalidArgument("boundary edge list does not match the edges owned by one triangle");
    }

    on_boundary_.assign(nodes_.size(), 0);
    for (const Edge& e : boundary_edges_) {
        on_boundary_[e[0]] = 1;
        on_boundary_[e[1]] = 1;
    }
    for (int i = 0; i < n; ++i) {
        if (on_boundary_[i]) boundary_nodes_.push_back(i);
    }

    if (is_disk_tag(domain_tag_)) {
        const double radius = outer_radius();
        for (int i : boundary_nodes_) {
            const double r = std::hypot(nodes_[i].x, nodes_[i].y);
            if (std::abs(r - radius) > h_max_ * h_max_) {
                throw InvalidArgument("disk boundary node " + std::to_string(i) + " is off the circle");
            }
        }
    }
}

double Mesh::triangle_area(std::size_t t) const {
    const Triangle& tri = triangles_.at(t);
    return signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double Mesh::total_area() const {
    double area = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) area += triangle_area(t);
    return area;
}

double Mesh::boundary_length() const {
    double length = 0.0;
    for (const Edge& e : boundary_edges_) length += distance(nodes_[e[0]], nodes_[e[1]]);
    return length;
}

double Mesh::outer_radius() const {
    double r = 0.0;
    for (const Point& p : nodes_) r = std::max(r, std::hypot(p.x, p.y));
    return r;
}

namespace {

struct RingPlan {
    int rings = 0;                 // N
    std::vector<int> counts;       // counts[k] for k = 1..N, counts[0] = 1 (center)
};

RingPlan plan_rings(double radius, double target_h) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("disk radius must be positive");
    }
    if (!(target_h > 0.0) || !(target_h < radius)) {
        throw InvalidArgument("target_h must satisfy 0 < target_h < radius");
    }
    RingPlan plan;
    const double ratio = radius / target_h;
    if (ratio > 1e7) {
        throw ResourceError("target_h is too small relative to the radius", static_cast<std::size_t>(-1));
    }
    plan.rings = static_cast<int>(std::ceil(ratio - 1e-9));
    const int n_rings = plan.rings;

    // Outer count 6*2^j: the smallest with boundary spacing <= 1.5 * dr.
    int j = 0;
    while (2.0 * std::numbers::pi * n_rings / (6.0 * std::ldexp(1.0, j)) > 1.5) ++j;
    plan.counts.assign(static_cast<std::size_t>(n_rings) + 1, 6);
    plan.counts[0] = 1;
    for (int k = 1; k <= n_rings; ++k) {
        // One halving of the count per halving of the radius.
        int halvings = 0;
        while (static_cast<double>(k) * std::ldexp(1.0, halvings + 1) <= n_rings) ++halvings;
        plan.counts[k] = halvings <= j ? 6 << (j - halvings) : 6;
    }
    return plan;
}

}  // namespace

std::size_t estimate_disk_nodes(double radius, double target_h) {
    const RingPlan plan = plan_rings(radius, target_h);
    std::size_t total = 0;
    for (int c : plan.counts) total += static_cast<std::size_t>(c);
    return total;
}

Mesh build_disk_mesh(double radius, double target_h, const DiskMeshOptions& options) {
    const RingPlan plan = plan_rings(radius, target_h);
    std::size_t estimate = 0;
    for (int c : plan.counts) estimate += static_cast<std::size_t>(c);
    if (estimate > options.max_nodes) {
        std::ostringstream msg;
        msg << "disk mesh with target_h=" << target_h << " needs " << estimate
            << " nodes, above the budget of " << options.max_nodes;
        throw ResourceError(msg.str(), estimate);
    }

    const int n_rings = plan.rings;
    const double dr = radius / n_rings;
    std::vector<Point> nodes;
    nodes.reserve(estimate);
    nodes.push_back({0.0, 0.0});
    std::vector<int> first(static_cast<std::size_t>(n_rings) + 1, 0);
    std::vector<double> phase(static_cast<std::size_t>(n_rings) + 1, 0.0);

    for (int k = 1; k <= n_rings; ++k) {
        const int count = plan.counts[k];
        if (k >= 2) {
            // Equal counts: shift by half a step so triangles alternate.
            // Doubled count: keep every other node aligned with the inner ring.
            phase[k] = plan.counts[k - 1] == count ? phase[k - 1] + std::numbers::pi / count
                                                   : phase[k - 1];
        }
        const double r = k == n_rings ? radius : k * dr;
        first[k] = static_cast<int>(nodes.size());
        for (int i = 0; i < count; ++i) {
            const double theta = phase[k] + 2.0 * std::numbers::pi * i / count;
            nodes.push_back({r * std::cos(theta), r * std::sin(theta)});
        }
    }

    std::vector<Triangle> triangles;
    auto add = [&](int a, int b, int c) {
        if (signed_area(nodes[a], nodes[b], nodes[c]) < 0.0) std::swap(b, c);
        triangles.push_back({a, b, c});
    };

    {
        const int count = plan.counts[1];
        for (int i = 0; i < count; ++i) add(0, first[1] + i, first[1] + (i + 1) % count);
    }
    for (int k = 2; k <= n_rings; ++k) {
        const int m = plan.counts[k - 1];
        const int n = plan.counts[k];
        auto in = [&](int i) { return first[k - 1] + (i % m); };
        auto out = [&](int i) { return first[k] + (i % n); };
        if (n == m) {
            for (int i = 0; i < m; ++i) {
                add(in(i), out(i), in(i + 1));
                add(in(i + 1), out(i), out(i + 1));
            }
        } else {
            for (int i = 0; i < m; ++i) {
                add(in(i), out(2 * i), out(2 * i + 1));
                add(in(i), out(2 * i + 1), in(i + 1));
                add(in(i + 1), out(2 * i + 1), out(2 * i + 2));
            }
        }
    }

    std::vector<Edge> boundary;
    const int outer = plan.counts[n_rings];
    boundary.reserve(static_cast<std::size_t>(outer));
    for (int i = 0; i < outer; ++i) {
        boundary.push_back({first[n_rings] + i, first[n_rings] + (i + 1) % outer});
    }
    return Mesh(std::move(nodes), std::move(triangles), std::move(boundary),
                radius == 1.0 ? "unit_disk" : "disk");
}

MeshQuality mesh_quality(const Mesh& mesh) {
    MeshQuality q;
    q.n_nodes = mesh.n_nodes();
    q.n_triangles = mesh.n_triangles();
    q.h_max = mesh.h_max();
    q.h_min = mesh.h_min();
    double min_angle = std::numbers::pi;
    const auto& nodes = mesh.nodes();
    for (const Triangle& tri : mesh.triangles()) {
        for (int corner = 0; corner < 3; ++corner) {
            const Point& p = nodes[tri[corner]];
            const Point& a = nodes[tri[(corner + 1) % 3]];
            const Point& b = nodes[tri[(corner + 2) % 3]];
            const double ux = a.x - p.x, uy = a.y - p.y;
            const double vx = b.x - p.x, vy = b.y - p.y;
            min_angle = std::min(min_angle, std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy));
        }
    }
    q.min_angle_deg = min_angle * 180.0 / std::numbers::pi;
    return q;
}

int ring_aligned_bins(const Mesh& mesh) {
    const double radius = mesh.outer_radius();
    std::vector<double> radii;
    radii.reserve(mesh.n_nodes());
    for (const Point& p : mesh.nodes()) radii.push_back(std::hypot(p.x, p.y));
    std::sort(radii.begin(), radii.end());
    const double tol = 1e-9 * radius;
    std::vector<double> levels;
    for (double r : radii) {
        if (levels.empty() || r - levels.back() > tol) levels.push_back(r);
    }
    const int fallback = std::max(2, static_cast<int>(std::lround(radius / mesh.h_max())));
    const int n_rings = static_cast<int>(levels.size()) - 1;
    if (n_rings < 1 || levels.front() > tol || levels.size() * levels.size() > 4 * mesh.n_nodes()) {
        return fallback;
    }
    for (int k = 0; k <= n_rings; ++k) {
        if (std::abs(levels[k] - radius * k / n_rings) > 1e-6 * radius) return fallback;
    }
    // Rings at k*R/N fall one per bin when the bin width is R/(N+1).
    return n_rings + 1;
}

}  // namespace gmrd
