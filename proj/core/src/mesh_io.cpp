#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gmrd/errors.hpp"
#include "gmrd/mesh.hpp"

namespace gmrd {

namespace {

std::string shortest(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

double parse_double(const std::string& token) {
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        throw ParseError("invalid number '" + token + "' in mesh file", 0);
    }
    return value;
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "nodes " << mesh.n_nodes() << " triangles " << mesh.n_triangles() << " boundary_edges "
       << mesh.boundary_edges().size() << '\n';
    for (const Point& p : mesh.nodes()) os << shortest(p.x) << ' ' << shortest(p.y) << '\n';
    for (const Triangle& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const Edge& e : mesh.boundary_edges()) os << e[0] << ' ' << e[1] << '\n';
}

Mesh read_mesh(std::istream& is, std::string domain_tag) {
    std::string w_nodes, w_tris, w_edges;
    std::size_t n = 0, m = 0, k = 0;
    if (!(is >> w_nodes >> n >> w_tris >> m >> w_edges >> k) || w_nodes != "nodes" ||
        w_tris != "triangles" || w_edges != "boundary_edges") {
        throw ParseError("mesh header must be 'nodes N triangles M boundary_edges K'", 1);
    }
    std::vector<Point> nodes(n);
    for (auto& p : nodes) {
        std::string xs, ys;
        if (!(is >> xs >> ys)) throw ParseError("truncated node list", 0);
        p = {parse_double(xs), parse_double(ys)};
    }
    std::vector<Triangle> triangles(m);
    for (auto& t : triangles) {
        if (!(is >> t[0] >> t[1] >> t[2])) throw ParseError("truncated triangle list", 0);
    }
    std::vector<Edge> edges(k);
    for (auto& e : edges) {
        if (!(is >> e[0] >> e[1])) throw ParseError("truncated boundary edge list", 0);
    }
    return Mesh(std::move(nodes), std::move(triangles), std::move(edges), std::move(domain_tag));
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_mesh(os, mesh);
}

Mesh read_mesh_file(const std::string& path, std::string domain_tag) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_mesh(is, std::move(domain_tag));
}

}  // namespace gmrd
