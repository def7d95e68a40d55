#include <gtest/gtest.h>

#include <sstream>

#include "gmrd/csv.hpp"
#include "gmrd/errors.hpp"
#include "gmrd/experiment.hpp"

using namespace gmrd;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Config, PresetAloneGivesTableColumn) {
    const ExperimentSpec s = parse_config("preset = \"wnt\"\n");
    EXPECT_EQ(s.preset, "wnt");
    EXPECT_EQ(s.params.a, 77.76);
    EXPECT_EQ(s.params.b, 194.4);
    EXPECT_EQ(s.params.c, 194.4);
    EXPECT_EQ(s.params.d, 97.2);
    EXPECT_EQ(s.params.mu_u, 3.8);
    EXPECT_EQ(s.params.mu_v, 19.0);
    EXPECT_EQ(s.params.h_u, 172.8);
    EXPECT_EQ(s.params.h_v, 172.8);
    EXPECT_EQ(s.params.u_bar, 0.0);
    EXPECT_EQ(s.f.outer, 670.0);
    EXPECT_EQ(s.f.radius, 0.85);
    EXPECT_EQ(s.mesh.target_h, 0.02);
    EXPECT_EQ(s.schedule.dt, 1e-4);
    EXPECT_EQ(s.schedule.t_end, 3.0);
    EXPECT_EQ(s.provenance.at("params.a"), "preset");
}

TEST(Config, EmptyInputListsRequiredKeys) {
    try {
        parse_config("");
        FAIL();
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("preset"), std::string::npos);
        EXPECT_NE(msg.find("params.a"), std::string::npos);
        EXPECT_NE(msg.find("params.mu_v"), std::string::npos);
    }
}

TEST(Config, NegativeCoefficientNamesLine) {
    EXPECT_EQ(error_line("preset = \"wnt\"\nparams.a = -1\n"), 2);
    EXPECT_EQ(error_line("preset = \"wnt\"\n\n[params]\nb = -3\n"), 4);
}

TEST(Config, ErrorsNameTheLine) {
    EXPECT_EQ(error_line("preset = \"bmp4\"\n[mesh]\nwidth = 3\n"), 3);
    EXPECT_EQ(error_line("preset = \"bmp4\"\n[schedule]\ndt = fast\n"), 3);
    EXPECT_EQ(error_line("preset = \"bmp4\"\n[mesh\n"), 2);
    EXPECT_EQ(error_line("preset = \"bmp4\"\njunk\n"), 2);
    EXPECT_EQ(error_line("preset = \"bmp4\"\n[mesh]\nh = 0.1\nh = 0.2\n"), 4);
    EXPECT_EQ(error_line("preset = \"zebra\"\n"), 1);
    EXPECT_EQ(error_line("[params]\na = 1\nb = 1\n"), 2);
}

TEST(Config, OverridesAndProvenance) {
    const ExperimentSpec s = parse_config(R"(# comment
preset = "nodal"
[mesh]
h = 0.05   # coarser
[schedule]
dt = 5e-4
t_end = 1
tcut = 0.01
snapshot_times = "0, 0.5, 1"
[solver]
integrator = explicit
linear_solver = cg
[output]
dir = "runs/nodal"
)");
    EXPECT_EQ(s.mesh.target_h, 0.05);
    EXPECT_EQ(s.schedule.dt, 5e-4);
    EXPECT_EQ(*s.tcut, 0.01);
    EXPECT_EQ(s.schedule.snapshot_times.size(), 3u);
    EXPECT_EQ(s.run.integrator, Integrator::explicit_euler);
    EXPECT_EQ(s.run.linear_solver, LinearSolverKind::cg);
    EXPECT_EQ(s.output_dir, "runs/nodal");
    EXPECT_EQ(s.provenance.at("mesh.h"), "config");
    EXPECT_EQ(s.provenance.at("params.a"), "preset");
    const Schedule sched = s.resolved_schedule();
    ASSERT_EQ(sched.events.size(), 1u);
    EXPECT_EQ(sched.events[0].time, 0.01);
}

TEST(Config, ExplicitParamsWithoutPreset) {
    const ExperimentSpec s = parse_config(R"(
[params]
a = 1
b = 2
c = 3
d = 4
mu_u = 0.5
mu_v = 5
[boundary]
kind = dirichlet
)");
    EXPECT_TRUE(s.preset.empty());
    EXPECT_EQ(s.params.d, 4.0);
    EXPECT_EQ(s.boundary.kind, BoundaryKind::dirichlet);
}

TEST(Config, PhysicalSection) {
    const ExperimentSpec s = parse_config(R"(
[physical]
mu_a = 11
mu_i = 55
lambda_a = 9e-4
k_a = 9e-4
lambda_i = 9e-4
k_i = 9e-4
H_a = 0.3456
H_i = 0.3456
u_bar = 3
[initial]
u0 = 3
)");
    EXPECT_NEAR(s.params.a, 77.76, 1e-12);
    EXPECT_NEAR(s.params.mu_u, 3.8016, 1e-12);
    EXPECT_NEAR(s.params.h_u, 172.8, 1e-12);
    EXPECT_EQ(s.provenance.at("params.a"), "physical");
    EXPECT_THROW(parse_physical("[physical]\nmu_a = 1\n"), ParseError);
}

TEST(Config, WriteSpecRoundTrips) {
    ExperimentSpec s = make_preset("wnt");
    s.tcut = 0.005;
    s.mesh.target_h = 0.04;
    std::stringstream ss;
    write_spec(ss, s);
    const ExperimentSpec back = parse_config(ss.str());
    EXPECT_EQ(back.params.b, s.params.b);
    EXPECT_EQ(back.mesh.target_h, 0.04);
    EXPECT_EQ(*back.tcut, 0.005);
    EXPECT_EQ(back.f.outer, 670.0);
}

TEST(Presets, AllNamesResolve) {
    for (const std::string& name : preset_names()) {
        const ExperimentSpec s = make_preset(name);
        EXPECT_NO_THROW(s.validate()) << name;
        EXPECT_FALSE(s.notes.empty());
    }
    EXPECT_THROW(make_preset("unknown"), InvalidArgument);
}

TEST(Presets, TableValues) {
    const ExperimentSpec b = make_preset("bmp4");
    EXPECT_EQ(b.params.a, 77.76);
    EXPECT_EQ(b.params.u_bar, 3.0);
    EXPECT_EQ(b.u0.value, 3.0);
    EXPECT_TRUE(b.f.is_zero());
    const ExperimentSpec n = make_preset("nodal");
    EXPECT_EQ(n.params.a, 31.104);
    EXPECT_EQ(n.params.c, 77.76);
    EXPECT_EQ(n.params.d, 38.88);
    const ExperimentSpec i = make_preset("instability");
    EXPECT_EQ(i.params.mu_u, 0.3456);
    EXPECT_EQ(i.params.mu_v, 19.008);
    const ExperimentSpec d = make_preset("bmp4_dirichlet");
    EXPECT_EQ(d.boundary.kind, BoundaryKind::dirichlet);
    EXPECT_EQ(d.params.mu_u, d.params.mu_v);
}

TEST(Presets, SnapshotTimesOnStepGrid) {
    const Schedule s = make_preset("wnt").resolved_schedule();
    ASSERT_GE(s.snapshot_times.size(), 2u);
    EXPECT_EQ(s.snapshot_times.front(), 0.0);
    EXPECT_EQ(s.snapshot_times.back(), 3.0);
    for (double t : s.snapshot_times) {
        EXPECT_NEAR(t / 1e-4, std::round(t / 1e-4), 1e-6);
    }
}

TEST(Csv, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 77.76, -1e-300, 6.02e23}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(Csv, SnapshotRoundTrip) {
    const Mesh m = build_disk_mesh(1.0, 0.3);
    Snapshot s{0.25, Field::LinSpaced(static_cast<Eigen::Index>(m.n_nodes()), 0.0, 1.0),
               Field::LinSpaced(static_cast<Eigen::Index>(m.n_nodes()), 2.0, 3.0)};
    std::stringstream ss;
    write_snapshot_csv(ss, m, s, "wnt");
    std::string first;
    std::getline(ss, first);
    EXPECT_EQ(first, "# t=0.25 preset=wnt");
    ss.seekg(0);
    const Snapshot back = read_snapshot_csv(ss);
    EXPECT_EQ(back.t, 0.25);
    EXPECT_EQ(back.u, s.u);
    EXPECT_EQ(back.v, s.v);
}

TEST(Csv, TimeseriesHeader) {
    std::stringstream ss;
    write_timeseries_csv(ss, {Diagnostics{}});
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "t,u_min,u_max,v_min,v_max,l2_u,l2_v,ut_l2,vt_l2,grad_l2,asymmetry");
}
