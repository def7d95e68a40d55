#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gmrd/analysis.hpp"
#include "gmrd/mesh.hpp"
#include "gmrd/simulate.hpp"

namespace gmrd {

// Shortest round-trip decimal form.
std::string format_double(double x);

// "# t=<t> preset=<name>" then node,x,y,u,v.
void write_snapshot_csv(std::ostream& os, const Mesh& mesh, const Snapshot& snapshot,
                        const std::string& preset);
// Reads a file written by write_snapshot_csv; t comes from the header comment.
Snapshot read_snapshot_csv(std::istream& is);

void write_timeseries_csv(std::ostream& os, const std::vector<Diagnostics>& series);
// r,u_mean,u_spread,v_mean,v_spread
void write_profile_csv(std::ostream& os, const RadialProfile& u, const RadialProfile& v);
// r,u,v ordered from the boundary to the center.
void write_phase_curve_csv(std::ostream& os, const std::vector<PhasePoint>& curve);

}  // namespace gmrd
