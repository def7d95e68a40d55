#include "gmrd/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "gmrd/errors.hpp"

namespace gmrd {

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), result.ptr);
}

void write_snapshot_csv(std::ostream& os, const Mesh& mesh, const Snapshot& snapshot,
                        const std::string& preset) {
    os << "# t=" << format_double(snapshot.t) << " preset=" << (preset.empty() ? "custom" : preset)
       << '\n';
    os << "node,x,y,u,v\n";
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        const Point& p = mesh.nodes()[i];
        const auto k = static_cast<Eigen::Index>(i);
        os << i << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
           << format_double(snapshot.u[k]) << ',' << format_double(snapshot.v[k]) << '\n';
    }
}

namespace {

double parse_field(const std::string& s, int line) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("expected a number, got '" + s + "'", line);
    }
    return x;
}

}  // namespace

Snapshot read_snapshot_csv(std::istream& is) {
    Snapshot snap;
    std::string line;
    int line_no = 0;
    std::vector<double> u;
    std::vector<double> v;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("t=");
            if (pos != std::string::npos) {
                const auto end = line.find(' ', pos);
                snap.t = parse_field(line.substr(pos + 2, end == std::string::npos ? end : end - pos - 2),
                                     line_no);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "node,x,y,u,v") throw ParseError("expected header node,x,y,u,v", line_no);
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw ParseError("expected 5 columns", line_no);
        if (static_cast<std::size_t>(parse_field(cells[0], line_no)) != u.size()) {
            throw ParseError("node indices must be consecutive from 0", line_no);
        }
        u.push_back(parse_field(cells[3], line_no));
        v.push_back(parse_field(cells[4], line_no));
    }
    if (!header_seen) throw ParseError("missing snapshot header", line_no);
    snap.u = Eigen::Map<Field>(u.data(), static_cast<Eigen::Index>(u.size()));
    snap.v = Eigen::Map<Field>(v.data(), static_cast<Eigen::Index>(v.size()));
    return snap;
}

void write_timeseries_csv(std::ostream& os, const std::vector<Diagnostics>& series) {
    os << "t,u_min,u_max,v_min,v_max,l2_u,l2_v,ut_l2,vt_l2,grad_l2,asymmetry\n";
    for (const Diagnostics& d : series) {
        os << format_double(d.t) << ',' << format_double(d.u_min) << ',' << format_double(d.u_max)
           << ',' << format_double(d.v_min) << ',' << format_double(d.v_max) << ','
           << format_double(d.l2_u) << ',' << format_double(d.l2_v) << ',' << format_double(d.ut_l2)
           << ',' << format_double(d.vt_l2) << ',' << format_double(d.grad_l2) << ','
           << format_double(d.asymmetry) << '\n';
    }
}

void write_profile_csv(std::ostream& os, const RadialProfile& u, const RadialProfile& v) {
    os << "r,u_mean,u_spread,v_mean,v_spread\n";
    for (std::size_t b = 0; b < u.centers.size(); ++b) {
        os << format_double(u.centers[b]) << ',' << format_double(u.mean[b]) << ','
           << format_double(u.spread[b]) << ',' << format_double(v.mean[b]) << ','
           << format_double(v.spread[b]) << '\n';
    }
}

void write_phase_curve_csv(std::ostream& os, const std::vector<PhasePoint>& curve) {
    os << "r,u,v\n";
    for (const PhasePoint& p : curve) {
        os << format_double(p.r) << ',' << format_double(p.u) << ',' << format_double(p.v) << '\n';
    }
}

}  // namespace gmrd
