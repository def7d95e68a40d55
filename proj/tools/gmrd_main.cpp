// gmrd: command-line front end for the reaction-diffusion toolkit.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gmrd/csv.hpp"
#include "gmrd/errors.hpp"
#include "gmrd/experiment.hpp"
#include "gmrd/scaling.hpp"
#include "gmrd/scenario.hpp"

namespace fs = std::filesystem;
using namespace gmrd;

namespace {

enum Exit { ok = 0, config_error = 2, resource_error = 3, numerical_error = 4, io_error = 5 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config;
    std::string preset;
    std::string out;
    double dt = 0.0;
    double h = 0.0;
    double t_end = 0.0;
    std::string integrator;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "configuration file");
    cmd->add_option("--preset", c.preset, "preset name (bmp4, wnt, nodal, instability, bmp4_dirichlet)");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--dt", c.dt, "time step");
    cmd->add_option("--h", c.h, "target mesh size");
    cmd->add_option("--t-end", c.t_end, "final time (days)");
    cmd->add_option("--integrator", c.integrator, "imex or explicit")
        ->check(CLI::IsMember({"imex", "explicit"}));
}

ExperimentSpec resolve(const Common& c) {
    ExperimentSpec spec;
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw IoError("cannot open config file " + c.config);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        spec = parse_config(c.preset.empty() ? text : "preset = \"" + c.preset + "\"\n" + text);
    } else if (!c.preset.empty()) {
        spec = make_preset(c.preset);
    } else {
        throw InvalidArgument("either --config or --preset is required");
    }
    if (!c.out.empty()) spec.output_dir = c.out;
    if (c.dt > 0.0) spec.schedule.dt = c.dt;
    if (c.h > 0.0) spec.mesh.target_h = c.h;
    if (c.t_end > 0.0) spec.schedule.t_end = c.t_end;
    if (c.integrator == "explicit") spec.run.integrator = Integrator::explicit_euler;
    if (c.integrator == "imex") spec.run.integrator = Integrator::imex;
    spec.validate();
    return spec;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_mesh(double radius, double h, const std::string& out) {
    const Mesh mesh = build_disk_mesh(radius, h);
    const MeshQuality q = mesh_quality(mesh);
    std::cout << "nodes " << q.n_nodes << "\ntriangles " << q.n_triangles << "\nboundary_edges "
              << mesh.boundary_edges().size() << "\nh_max " << q.h_max << "\nh_min " << q.h_min
              << "\nmin_angle_deg " << q.min_angle_deg << "\narea " << mesh.total_area() << '\n';
    if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw IoError("cannot write " + out);
        write_mesh(os, mesh);
    }
    return ok;
}

int cmd_run(const Common& c, double tcut) {
    ExperimentSpec spec = resolve(c);
    if (tcut >= 0.0) spec.tcut = tcut;
    const ScenarioReport rep = run_scenario(spec);
    write_summary(std::cout, spec, rep);
    std::cout << "outputs: " << spec.output_dir << '\n';
    return ok;
}

int cmd_sweep(const Common& c, std::vector<double> tcuts, int threads) {
    ExperimentSpec spec = resolve(c);
    std::sort(tcuts.begin(), tcuts.end());
    SweepOptions opts;
    opts.threads = threads;
    opts.output_dir = spec.output_dir;
    const SweepResult res = tcut_sweep(spec, tcuts, opts);
    fs::create_directories(spec.output_dir);
    std::ofstream os(fs::path(spec.output_dir) / "sweep.csv");
    if (!os) throw IoError("cannot write sweep.csv");
    write_sweep_csv(os, res);
    write_sweep_csv(std::cout, res);
    return ok;
}

int cmd_analyze(const std::string& dir, int n_bins) {
    const Mesh mesh = read_mesh_file((fs::path(dir) / "mesh.txt").string(), "unit_disk");
    if (n_bins <= 0) n_bins = ring_aligned_bins(mesh);
    const RadialBinning bins = make_radial_binning(mesh, n_bins);
    const Vector mass = lumped_mass_diagonal(mesh);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fs::path(dir) / "snapshots")) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::ofstream os(fs::path(dir) / "analysis.csv");
    if (!os) throw IoError("cannot write analysis.csv");
    const std::string header = "t,u_peak,u_argmax_r,wavefront_r,asymmetry,l2_u,l2_v";
    os << header << '\n';
    std::cout << header << '\n';
    for (const fs::path& p : files) {
        std::ifstream in(p);
        const Snapshot s = read_snapshot_csv(in);
        if (static_cast<std::size_t>(s.u.size()) != mesh.n_nodes()) {
            throw InvalidArgument(p.string() + " does not match mesh.txt");
        }
        const RadialProfile prof = radial_profile(bins, mass, s.u);
        const auto front = wavefront_radius(prof, 0.5);
        std::ostringstream line;
        line << format_double(s.t) << ',' << format_double(prof.peak()) << ','
             << format_double(prof.centers[prof.argmax()]) << ','
             << (front ? format_double(*front) : std::string("nan")) << ','
             << format_double(asymmetry_index(bins, s.u)) << ',' << format_double(l2_norm(mesh, s.u))
             << ',' << format_double(l2_norm(mesh, s.v));
        os << line.str() << '\n';
        std::cout << line.str() << '\n';
    }
    return ok;
}

int cmd_fixedpoints(const Common& c) {
    const ExperimentSpec spec = resolve(c);
    const auto points = fixed_points(spec.params);
    std::cout << "regime " << to_string(regime_type(spec.params)) << '\n';
    write_fixed_points_csv(std::cout, points);
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        std::ofstream fp(fs::path(c.out) / "fixed_points.csv");
        std::ofstream nc(fs::path(c.out) / "nullclines.csv");
        if (!fp || !nc) throw IoError("cannot write to " + c.out);
        write_fixed_points_csv(fp, points);
        double u_max = 1.0;
        for (const FixedPoint& p : points) u_max = std::max(u_max, 1.5 * p.u);
        write_nullclines_csv(nc, nullclines(spec.params, u_max, 201));
    }
    return ok;
}

int cmd_scale(const std::string& config, const std::string& preset, bool inverse, double L, double tau) {
    if (inverse) {
        if (preset.empty()) throw InvalidArgument("scale --inverse needs --preset");
        write_physical(std::cout, dimensionalize(make_preset(preset).params, L, tau));
        return ok;
    }
    const PhysicalParams p = config.empty() ? bmp4_physical() : parse_physical(read_file(config));
    write_kinetics(std::cout, nondimensionalize(p));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gierer-Meinhardt reaction-diffusion toolkit"};
    // Plain --help so that --h stays free for the mesh size.
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    double radius = 1.0;
    double mesh_h = 0.02;
    std::string mesh_out;
    auto* mesh = app.add_subcommand("mesh", "generate a disk mesh and report its quality");
    mesh->add_option("--radius", radius, "disk radius");
    mesh->add_option("--h", mesh_h, "target mesh size");
    mesh->add_option("--out", mesh_out, "write the mesh to this file");

    Common run_args;
    double tcut = -1.0;
    auto* run = app.add_subcommand("run", "run one scenario");
    add_common(run, run_args);
    run->add_option("--tcut", tcut, "switch the activator source off at this time");

    Common sweep_args;
    std::vector<double> tcuts;
    int threads = 0;
    auto* sweep = app.add_subcommand("sweep", "tcut sweep");
    add_common(sweep, sweep_args);
    sweep->add_option("--tcuts", tcuts, "tcut values")->required()->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads (capped by RD_THREADS)");

    std::string analyze_dir;
    int n_bins = 0;
    auto* analyze = app.add_subcommand("analyze", "post-process the snapshots of a run directory");
    analyze->add_option("dir", analyze_dir, "output directory of a previous run")->required();
    analyze->add_option("--bins", n_bins, "radial bins (default: one per ring)");

    Common fp_args;
    auto* fps = app.add_subcommand("fixedpoints", "fixed points, classification and nullclines");
    add_common(fps, fp_args);

    std::string scale_config;
    std::string scale_preset;
    bool inverse = false;
    double L = 500.0;
    double tau = 86400.0;
    auto* scale = app.add_subcommand("scale", "convert between physical and dimensionless parameters");
    scale->add_option("--config", scale_config, "file with a [physical] section");
    scale->add_option("--preset", scale_preset, "preset to dimensionalize");
    scale->add_flag("--inverse", inverse, "dimensionless -> physical");
    scale->add_option("--L", L, "length scale (um)");
    scale->add_option("--tau", tau, "time scale (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*mesh) return cmd_mesh(radius, mesh_h, mesh_out);
        if (*run) return cmd_run(run_args, tcut);
        if (*sweep) return cmd_sweep(sweep_args, tcuts, threads);
        if (*analyze) return cmd_analyze(analyze_dir, n_bins);
        if (*fps) return cmd_fixedpoints(fp_args);
        if (*scale) return cmd_scale(scale_config, scale_preset, inverse, L, tau);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << " (needs ~" << e.required() << " nodes)\n";
        return resource_error;
    } catch (const IntegrationError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const DomainError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return numerical_error;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return io_error;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    }
    return ok;
}
