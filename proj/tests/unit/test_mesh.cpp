#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>

#include "gmrd/errors.hpp"
#include "gmrd/mesh.hpp"
#include "oracles.hpp"

using namespace gmrd;

namespace {

double summed_area(const Mesh& m) {
    double area = 0.0;
    for (const Triangle& t : m.triangles()) {
        const Point& a = m.nodes()[t[0]];
        const Point& b = m.nodes()[t[1]];
        const Point& c = m.nodes()[t[2]];
        area += oracle::shoelace(a.x, a.y, b.x, b.y, c.x, c.y);
    }
    return area;
}

double min_angle(const Mesh& m) {
    double best = 180.0;
    for (const Triangle& t : m.triangles()) {
        for (int k = 0; k < 3; ++k) {
            const Point& a = m.nodes()[t[k]];
            const Point& b = m.nodes()[t[(k + 1) % 3]];
            const Point& c = m.nodes()[t[(k + 2) % 3]];
            best = std::min(best, oracle::corner_angle_deg(a.x, a.y, b.x, b.y, c.x, c.y));
        }
    }
    return best;
}

double longest_edge(const Mesh& m) {
    double h = 0.0;
    for (const Triangle& t : m.triangles()) {
        for (int k = 0; k < 3; ++k) {
            const Point& a = m.nodes()[t[k]];
            const Point& b = m.nodes()[t[(k + 1) % 3]];
            h = std::max(h, std::hypot(a.x - b.x, a.y - b.y));
        }
    }
    return h;
}

Mesh single_equilateral() {
    return Mesh({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, {{0, 1, 2}},
                {{0, 1}, {1, 2}, {2, 0}}, "triangle");
}

}  // namespace

TEST(DiskMesh, CoarseMeshCoversDisk) {
    const Mesh m = build_disk_mesh(1.0, 0.5);
    EXPECT_GE(m.n_triangles(), 4u);
    EXPECT_NEAR(summed_area(m), std::numbers::pi, 0.15);
}

TEST(DiskMesh, FineMeshAreaAndAngle) {
    const Mesh m = build_disk_mesh(1.0, 0.05);
    EXPECT_NEAR(summed_area(m), std::numbers::pi, 0.01);
    EXPECT_GE(min_angle(m), 20.0);
    EXPECT_NEAR(m.total_area(), summed_area(m), 1e-12);
}

TEST(DiskMesh, SizeBoundAndBoundaryOnCircle) {
    for (double h : {0.3, 0.1, 0.05, 0.02}) {
        const Mesh m = build_disk_mesh(1.0, h);
        EXPECT_LE(longest_edge(m), 1.5 * h) << "h=" << h;
        EXPECT_DOUBLE_EQ(m.h_max(), longest_edge(m));
        for (int i : m.boundary_nodes()) {
            const Point& p = m.nodes()[i];
            EXPECT_NEAR(std::hypot(p.x, p.y), 1.0, 1e-14);
        }
        EXPECT_EQ(m.domain_tag(), "unit_disk");
    }
}

TEST(DiskMesh, OtherRadius) {
    const Mesh m = build_disk_mesh(2.5, 0.2);
    EXPECT_EQ(m.domain_tag(), "disk");
    EXPECT_NEAR(summed_area(m), std::numbers::pi * 2.5 * 2.5, 0.1);
    for (int i : m.boundary_nodes()) {
        EXPECT_NEAR(std::hypot(m.nodes()[i].x, m.nodes()[i].y), 2.5, 1e-13);
    }
}

TEST(DiskMesh, TopologyInvariants) {
    const Mesh m = build_disk_mesh(1.0, 0.1);
    std::map<std::pair<int, int>, int> uses;
    for (const Triangle& t : m.triangles()) {
        const Point& a = m.nodes()[t[0]];
        const Point& b = m.nodes()[t[1]];
        const Point& c = m.nodes()[t[2]];
        EXPECT_GT(oracle::shoelace(a.x, a.y, b.x, b.y, c.x, c.y), 0.0);
        for (int k = 0; k < 3; ++k) {
            const int i = t[k];
            const int j = t[(k + 1) % 3];
            ++uses[{std::min(i, j), std::max(i, j)}];
        }
    }
    std::size_t single = 0;
    for (const auto& [edge, n] : uses) {
        EXPECT_LE(n, 2);
        if (n == 1) ++single;
    }
    EXPECT_EQ(single, m.boundary_edges().size());
    for (const Edge& e : m.boundary_edges()) {
        EXPECT_EQ((uses[{std::min(e[0], e[1]), std::max(e[0], e[1])}]), 1);
    }
}

TEST(DiskMesh, Deterministic) {
    const Mesh a = build_disk_mesh(1.0, 0.07);
    const Mesh b = build_disk_mesh(1.0, 0.07);
    ASSERT_EQ(a.n_nodes(), b.n_nodes());
    for (std::size_t i = 0; i < a.n_nodes(); ++i) {
        EXPECT_EQ(a.nodes()[i].x, b.nodes()[i].x);
        EXPECT_EQ(a.nodes()[i].y, b.nodes()[i].y);
    }
    EXPECT_EQ(a.triangles(), b.triangles());
}

TEST(DiskMesh, FineResolutionHitsBudget) {
    const std::size_t estimate = estimate_disk_nodes(1.0, 1e-3);
    try {
        const Mesh m = build_disk_mesh(1.0, 1e-3);
        // Only reachable if the budget allows it; then the count follows pi / (c h^2).
        const double c = std::numbers::pi / (1e-6 * static_cast<double>(m.n_nodes()));
        EXPECT_GT(c, 0.5);
        EXPECT_LT(c, 2.0);
    } catch (const ResourceError& e) {
        EXPECT_EQ(e.required(), estimate);
        EXPECT_GT(e.required(), DiskMeshOptions{}.max_nodes);
    }
}

TEST(DiskMesh, EstimateMatchesBuild) {
    for (double h : {0.2, 0.05, 0.02}) {
        EXPECT_EQ(estimate_disk_nodes(1.0, h), build_disk_mesh(1.0, h).n_nodes());
    }
    DiskMeshOptions tight;
    tight.max_nodes = 100;
    EXPECT_THROW(build_disk_mesh(1.0, 0.05, tight), ResourceError);
}

TEST(DiskMesh, BadArguments) {
    EXPECT_THROW(build_disk_mesh(0.0, 0.1), InvalidArgument);
    EXPECT_THROW(build_disk_mesh(1.0, 0.0), InvalidArgument);
    EXPECT_THROW(build_disk_mesh(1.0, 1.5), InvalidArgument);
}

TEST(DiskMesh, RefinementMonotonicity) {
    double prev = build_disk_mesh(1.0, 0.2).h_max();
    for (double h : {0.1, 0.05, 0.025}) {
        const double cur = build_disk_mesh(1.0, h).h_max();
        EXPECT_LE(cur, 1.5 * 0.5 * prev) << "h=" << h;
        prev = cur;
    }
}

TEST(DiskMesh, AreaConvergesQuadratically) {
    std::vector<double> err;
    std::vector<double> hs;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const Mesh m = build_disk_mesh(1.0, h);
        err.push_back(std::abs(summed_area(m) - std::numbers::pi));
        hs.push_back(m.h_max());
    }
    for (std::size_t k = 0; k < err.size(); ++k) {
        EXPECT_LT(err[k], 1.0 * hs[k] * hs[k]) << "h_max=" << hs[k];
    }
    EXPECT_GT(err.front() / err.back(), 30.0);
}

TEST(MeshQuality, EquilateralTriangle) {
    const MeshQuality q = mesh_quality(single_equilateral());
    EXPECT_NEAR(q.min_angle_deg, 60.0, 1e-12);
    EXPECT_NEAR(q.h_max, 1.0, 1e-15);
    EXPECT_NEAR(q.h_min, 1.0, 1e-15);
    EXPECT_EQ(q.n_nodes, 3u);
    EXPECT_EQ(q.n_triangles, 1u);
}

TEST(MeshQuality, DiskMeshMatchesDirectRecomputation) {
    const Mesh m = build_disk_mesh(1.0, 0.1);
    const MeshQuality q = mesh_quality(m);
    EXPECT_GT(q.min_angle_deg, 0.0);
    EXPECT_LE(q.h_max, 0.15);
    EXPECT_LE(q.h_min, q.h_max);
    EXPECT_NEAR(q.min_angle_deg, min_angle(m), 1e-9);
    EXPECT_NEAR(q.h_max, longest_edge(m), 1e-15);
}

TEST(MeshValidation, RejectsDegenerateTriangle) {
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}, {{0, 1}, {1, 2}, {2, 0}}, "bad"),
                 InvalidArgument);
}

TEST(MeshValidation, RejectsClockwiseTriangle) {
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {{0, 2}, {2, 1}, {1, 0}}, "cw"),
                 InvalidArgument);
}

TEST(MeshValidation, RejectsWrongBoundaryList) {
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {{0, 1}, {1, 2}}, "square"),
                 InvalidArgument);
    EXPECT_THROW(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5}}, {{0, 1}, {1, 2}, {2, 0}}, "oob"),
                 InvalidArgument);
}

TEST(MeshValidation, RejectsOffCircleBoundaryForUnitDisk) {
    const Mesh m = build_disk_mesh(1.0, 0.1);
    std::vector<Point> nodes = m.nodes();
    const int i = m.boundary_nodes().front();
    nodes[static_cast<std::size_t>(i)].x *= 1.1;
    nodes[static_cast<std::size_t>(i)].y *= 1.1;
    EXPECT_THROW(Mesh(nodes, m.triangles(), m.boundary_edges(), "unit_disk"), InvalidArgument);
    EXPECT_NO_THROW(Mesh(nodes, m.triangles(), m.boundary_edges(), "imported"));
}

TEST(MeshIo, RoundTripIsBitExact) {
    const Mesh m = build_disk_mesh(1.0, 0.08);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh back = read_mesh(ss, "unit_disk");
    ASSERT_EQ(back.n_nodes(), m.n_nodes());
    for (std::size_t i = 0; i < m.n_nodes(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.nodes()[i].x), std::bit_cast<std::uint64_t>(m.nodes()[i].x));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back.nodes()[i].y), std::bit_cast<std::uint64_t>(m.nodes()[i].y));
    }
    EXPECT_EQ(back.triangles(), m.triangles());
    EXPECT_EQ(back.boundary_edges(), m.boundary_edges());
    std::stringstream again;
    write_mesh(again, back);
    std::stringstream first;
    write_mesh(first, m);
    EXPECT_EQ(first.str(), again.str());
}

TEST(MeshIo, HeaderFormat) {
    std::stringstream ss;
    write_mesh(ss, single_equilateral());
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "nodes 3 triangles 1 boundary_edges 3");
}

TEST(MeshIo, MalformedInput) {
    std::stringstream bad_header("vertices 3\n");
    EXPECT_THROW(read_mesh(bad_header), ParseError);
    std::stringstream truncated("nodes 3 triangles 1 boundary_edges 3\n0 0\n1 0\n");
    EXPECT_THROW(read_mesh(truncated), ParseError);
}

TEST(RingBins, OneRingPerBin) {
    const Mesh m = build_disk_mesh(1.0, 0.1);
    const int bins = ring_aligned_bins(m);
    EXPECT_EQ(bins, 11);
}
