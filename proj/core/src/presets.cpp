#include <algorithm>
#include <cmath>

#include "gmrd/errors.hpp"
#include "gmrd/experiment.hpp"

namespace gmrd {

Field InitialSpec::evaluate(const Mesh& mesh) const {
    const double r2 = std::pow(mesh.outer_radius(), 2);
    Field out(static_cast<Eigen::Index>(mesh.n_nodes()));
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        const Point& p = mesh.nodes()[i];
        const double shape = std::max(0.0, 1.0 - (p.x * p.x + p.y * p.y) / r2);
        out[static_cast<Eigen::Index>(i)] = value + bump * shape;
    }
    return out;
}

Schedule ExperimentSpec::resolved_schedule() const {
    Schedule s = schedule;
    if (s.snapshot_times.empty() && snapshot_count >= 2) {
        const double t_min = std::min(1e-3, 0.5 * s.t_end);
        s.snapshot_times = log_spaced_times(t_min, s.t_end, snapshot_count);
        for (double& t : s.snapshot_times) t = std::min(s.t_end, std::round(t / s.dt) * s.dt);
        s.snapshot_times.erase(std::unique(s.snapshot_times.begin(), s.snapshot_times.end()),
                               s.snapshot_times.end());
    }
    if (tcut && *tcut < s.t_end) s.events.push_back({*tcut, EventAction::zero_source_f});
    return s;
}

void ExperimentSpec::validate() const {
    params.validate();
    if (!(mesh.radius > 0.0) || !(mesh.target_h > 0.0) || !(mesh.target_h < mesh.radius)) {
        throw InvalidArgument("mesh: need radius > 0 and 0 < h < radius");
    }
    if (tcut && *tcut < 0.0) throw InvalidArgument("tcut must be non-negative");
    if (u0.value < 0.0 || v0.value < 0.0 || u0.value + u0.bump < 0.0 || v0.value + v0.bump < 0.0) {
        throw InvalidArgument("initial data must be non-negative");
    }
    resolved_schedule().validate();
}

namespace {

constexpr double kSourceLevel = 670.0;
constexpr double kSourceRadius = 0.85;
constexpr double kTransfer = 172.8;

KineticsParams bmp4_params() {
    KineticsParams p;
    p.a = 77.76;
    p.b = 77.76;
    p.c = 77.76;
    p.d = 77.76;
    p.mu_u = 3.8;
    p.mu_v = 19.0;
    p.h_u = kTransfer;
    p.h_v = kTransfer;
    p.u_bar = 3.0;
    return p;
}

void mark_preset(ExperimentSpec& s) {
    for (const char* key :
         {"params.a", "params.b", "params.c", "params.d", "params.mu_u", "params.mu_v", "params.h_u",
          "params.h_v", "params.u_bar", "source.f_inner", "source.f_outer", "source.f_radius",
          "initial.u0", "initial.v0", "boundary.kind"}) {
        s.provenance[key] = "preset";
    }
    s.notes.push_back("h_u = h_v = 172.8 corresponds to H = 0.3456 1/um at L = 500 um");
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"bmp4", "wnt", "nodal", "instability", "bmp4_dirichlet"};
}

ExperimentSpec make_preset(const std::string& name) {
    ExperimentSpec s;
    s.preset = name;
    if (name == "bmp4") {
        s.params = bmp4_params();
        s.u0.value = 3.0;
    } else if (name == "wnt") {
        s.params = {77.76, 194.4, 194.4, 97.2, 3.8, 19.0, kTransfer, kTransfer, 0.0};
        s.f = SourceSpec::radial_step(0.0, kSourceLevel, kSourceRadius);
    } else if (name == "nodal") {
        s.params = {31.104, 77.76, 77.76, 38.88, 3.8, 19.0, kTransfer, kTransfer, 0.0};
        s.f = SourceSpec::radial_step(0.0, kSourceLevel, kSourceRadius);
    } else if (name == "instability") {
        s.params = bmp4_params();
        s.params.mu_u = 0.3456;
        s.params.mu_v = 19.008;
        s.u0.value = 3.0;
    } else if (name == "bmp4_dirichlet") {
        s.params = bmp4_params();
        s.params.mu_v = s.params.mu_u;
        s.params.u_bar = 0.0;
        s.f = SourceSpec::radial_step(0.0, kSourceLevel, kSourceRadius);
        s.boundary = BoundaryMode::dirichlet(0.0, 0.0);
    } else {
        std::string known;
        for (const std::string& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown preset '" + name + "' (known: " + known + ")");
    }
    mark_preset(s);
    return s;
}

}  // namespace gmrd
