#include "gmrd/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "gmrd/csv.hpp"
#include "gmrd/errors.hpp"

namespace gmrd {

namespace fs = std::filesystem;

PreparedMesh prepare_mesh(const MeshSettings& settings) {
    DiskMeshOptions opts;
    opts.max_nodes = settings.max_nodes;
    auto mesh = std::make_shared<const Mesh>(build_disk_mesh(settings.radius, settings.target_h, opts));
    auto ops = assemble_operators(*mesh);
    return {std::move(mesh), std::move(ops)};
}

SimState make_state(const ExperimentSpec& spec, const PreparedMesh& mesh) {
    return init_state(mesh.mesh, mesh.ops, spec.params, spec.u0.evaluate(*mesh.mesh),
                      spec.v0.evaluate(*mesh.mesh), spec.boundary, spec.f, spec.g);
}

Trajectory run(const ExperimentSpec& spec, const PreparedMesh& mesh) {
    spec.validate();
    return run(make_state(spec, mesh), spec.resolved_schedule(), spec.run);
}

ScenarioReport analyze(const ExperimentSpec& spec, const Mesh& mesh, Trajectory trajectory) {
    ScenarioReport rep;
    rep.fixed_points = fixed_points(spec.params);
    rep.regime = regime_type(spec.params);
    const int n_bins = spec.run.n_bins > 0 ? spec.run.n_bins : ring_aligned_bins(mesh);
    const RadialBinning bins = make_radial_binning(mesh, n_bins);
    const Vector mass = lumped_mass_diagonal(mesh);
    const SimState& fin = trajectory.final_state;
    rep.u_profile = radial_profile(bins, mass, fin.u);
    rep.v_profile = radial_profile(bins, mass, fin.v);
    rep.phase_curve = radial_phase_curve(mesh, fin.u, fin.v, n_bins);
    rep.turning_angle = total_turning_angle(rep.phase_curve);
    for (const Snapshot& s : trajectory.snapshots) {
        rep.wavefront.emplace_back(s.t, wavefront_radius(radial_profile(bins, mass, s.u), 0.5));
    }
    for (const Diagnostics& d : trajectory.timeseries) {
        rep.asymmetry_peak = std::max(rep.asymmetry_peak, d.asymmetry);
    }
    const double t_end = trajectory.t_end;
    const double t0 = t_end >= 2.0 ? 0.5 : 0.25 * t_end;
    const double t1 = t_end >= 2.0 ? 2.0 : t_end;
    rep.decay = decay_rate_fit(trajectory.timeseries, t0, t1);
    try {
        rep.lambda1 = poincare_constant(mesh).lambda1;
    } catch (const ConvergenceError&) {
        rep.lambda1 = std::nan("");
    }
    rep.trajectory = std::move(trajectory);
    return rep;
}

void write_summary(std::ostream& os, const ExperimentSpec& spec, const ScenarioReport& rep) {
    const Trajectory& tr = rep.trajectory;
    os << "preset: " << (spec.preset.empty() ? "custom" : spec.preset) << '\n';
    os << "boundary: " << to_string(spec.boundary.kind) << '\n';
    os << "regime: " << to_string(rep.regime) << '\n';
    os << "fixed points:\n";
    for (const FixedPoint& p : rep.fixed_points) {
        os << "  u=" << format_double(p.u) << " v=" << format_double(p.v) << " " << to_string(p.kind)
           << " trace=" << format_double(p.trace) << " det=" << format_double(p.det) << '\n';
    }
    os << "dt: " << format_double(tr.dt) << "\nt_end: " << format_double(tr.t_end) << '\n';
    if (spec.tcut) os << "tcut: " << format_double(*spec.tcut) << '\n';
    os << "steady_state_time: "
       << (tr.steady_state_time ? format_double(*tr.steady_state_time) : std::string("none")) << '\n';
    os << "min_u: " << format_double(tr.min_u) << "\nmin_v: " << format_double(tr.min_v) << '\n';
    os << "profile_argmax_r: " << format_double(rep.u_profile.centers[rep.u_profile.argmax()]) << '\n';
    os << "profile_peak: " << format_double(rep.u_profile.peak()) << '\n';
    os << "phase_turning_angle: " << format_double(rep.turning_angle) << '\n';
    os << "asymmetry_peak: " << format_double(rep.asymmetry_peak) << '\n';
    if (rep.decay.degenerate) {
        os << "decay_rate: degenerate\n";
    } else {
        os << "decay_rate: " << format_double(rep.decay.rate) << " on [" << format_double(rep.decay.t_begin)
           << ", " << format_double(rep.decay.t_end) << "] r2=" << format_double(rep.decay.r_squared)
           << (rep.decay.window_shrunk ? " (window shrunk)" : "") << '\n';
    }
    os << "lambda1: " << format_double(rep.lambda1) << '\n';
    os << "poincare_constant: " << format_double(1.0 / std::sqrt(rep.lambda1)) << '\n';
    os << "mu_u_lambda1: " << format_double(spec.params.mu_u * rep.lambda1) << '\n';
    for (const std::string& n : spec.notes) os << "note: " << n << '\n';
    for (const std::string& w : tr.warnings) os << "warning: " << w << '\n';
}

namespace {

std::ofstream open_out(const fs::path& path, std::vector<std::string>& files) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    files.push_back(path.string());
    return out;
}

std::string snapshot_name(std::size_t k) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(3) << std::setfill('0') << k << ".csv";
    return name.str();
}

}  // namespace

ScenarioReport run_scenario(const ExperimentSpec& spec) {
    const fs::path dir(spec.output_dir);
    fs::create_directories(dir / "snapshots");
    fs::remove(dir / "FAILED");
    std::vector<std::string> files;
    try {
        const PreparedMesh mesh = prepare_mesh(spec.mesh);
        {
            auto out = open_out(dir / "mesh.txt", files);
            write_mesh(out, *mesh.mesh);
        }
        {
            auto out = open_out(dir / "config.txt", files);
            write_spec(out, spec);
        }
        ScenarioReport rep = analyze(spec, *mesh.mesh, run(spec, mesh));
        const Trajectory& tr = rep.trajectory;
        for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
            auto out = open_out(dir / "snapshots" / snapshot_name(k), files);
            write_snapshot_csv(out, *mesh.mesh, tr.snapshots[k], spec.preset);
        }
        {
            auto out = open_out(dir / "timeseries.csv", files);
            write_timeseries_csv(out, tr.timeseries);
        }
        {
            auto out = open_out(dir / "profile.csv", files);
            write_profile_csv(out, rep.u_profile, rep.v_profile);
        }
        {
            const int n_bins = spec.run.n_bins > 0 ? spec.run.n_bins : ring_aligned_bins(*mesh.mesh);
            const RadialBinning bins = make_radial_binning(*mesh.mesh, n_bins);
            auto out = open_out(dir / "profiles.csv", files);
            out << "t,r,u_mean,v_mean\n";
            for (const Snapshot& s : tr.snapshots) {
                const RadialProfile pu = radial_profile(bins, mesh.ops->mass, s.u);
                const RadialProfile pv = radial_profile(bins, mesh.ops->mass, s.v);
                for (std::size_t b = 0; b < pu.centers.size(); ++b) {
                    out << format_double(s.t) << ',' << format_double(pu.centers[b]) << ','
                        << format_double(pu.mean[b]) << ',' << format_double(pv.mean[b]) << '\n';
                }
            }
        }
        {
            auto out = open_out(dir / "phase_curve.csv", files);
            write_phase_curve_csv(out, rep.phase_curve);
        }
        {
            auto out = open_out(dir / "wavefront.csv", files);
            out << "t,radius\n";
            for (const auto& [t, r] : rep.wavefront) {
                out << format_double(t) << ',' << (r ? format_double(*r) : std::string("nan")) << '\n';
            }
        }
        {
            auto out = open_out(dir / "fixed_points.csv", files);
            write_fixed_points_csv(out, rep.fixed_points);
        }
        {
            double u_max = 1.0;
            for (const FixedPoint& p : rep.fixed_points) u_max = std::max(u_max, 1.5 * p.u);
            auto out = open_out(dir / "nullclines.csv", files);
            write_nullclines_csv(out, nullclines(spec.params, u_max, 201));
        }
        {
            auto out = open_out(dir / "summary.txt", files);
            write_summary(out, spec, rep);
        }
        rep.files = std::move(files);
        return rep;
    } catch (const std::exception& e) {
        std::ofstream failed(dir / "FAILED");
        failed << e.what() << '\n';
        throw;
    }
}

std::string to_string(TerminalClass cls) {
    switch (cls) {
        case TerminalClass::zero_state:
            return "zero_state";
        case TerminalClass::nonzero_state:
            return "nonzero_state";
        case TerminalClass::failed:
            break;
    }
    return "failed";
}

int worker_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RD_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = requested > 0 ? std::min(n, cap) : cap;
    }
    return std::max(1, n);
}

SweepResult tcut_sweep(const ExperimentSpec& spec, const std::vector<double>& tcuts,
                       const SweepOptions& options) {
    if (!std::is_sorted(tcuts.begin(), tcuts.end())) throw InvalidArgument("tcut list must be sorted");
    for (double t : tcuts) {
        if (t < 0.0 || t > spec.schedule.t_end) throw InvalidArgument("tcut values must lie in [0, t_end]");
    }
    spec.validate();
    SweepResult result;
    result.cutoff = options.cutoff;
    result.entries.resize(tcuts.size());
    const PreparedMesh mesh = prepare_mesh(spec.mesh);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < tcuts.size(); k = next++) {
            SweepEntry& entry = result.entries[k];
            entry.tcut = tcuts[k];
            try {
                ExperimentSpec member = spec;
                member.tcut = tcuts[k];
                member.schedule.diagnostics_every = options.diagnostics_every;
                member.snapshot_count = 0;
                Trajectory tr = run(member, mesh);
                entry.terminal_l2 = l2_norm(*mesh.ops, tr.final_state.u);
                entry.cls = entry.terminal_l2 < options.cutoff ? TerminalClass::zero_state
                                                               : TerminalClass::nonzero_state;
                if (!options.output_dir.empty()) {
                    const fs::path dir = fs::path(options.output_dir) / ("tcut_" + format_double(tcuts[k]));
                    fs::create_directories(dir);
                    std::ofstream ts(dir / "timeseries.csv");
                    write_timeseries_csv(ts, tr.timeseries);
                    std::ofstream snap(dir / "final.csv");
                    write_snapshot_csv(snap, *mesh.mesh, {tr.t_end, tr.final_state.u, tr.final_state.v},
                                       spec.preset);
                }
            } catch (const std::exception& e) {
                entry.cls = TerminalClass::failed;
                entry.error = e.what();
            }
        }
    };
    const int n_threads = std::min<int>(worker_threads(options.threads), static_cast<int>(tcuts.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    const SweepEntry* prev = nullptr;
    for (const SweepEntry& e : result.entries) {
        if (e.cls == TerminalClass::failed) continue;
        if (prev && prev->cls != e.cls) {
            const double width = e.tcut - prev->tcut;
            if (!result.bracket || width < result.bracket->second - result.bracket->first) {
                result.bracket = {prev->tcut, e.tcut};
            }
        }
        prev = &e;
    }
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "# zero_state cutoff=" << format_double(result.cutoff) << '\n';
    if (result.bracket) {
        os << "# bracket=" << format_double(result.bracket->first) << ','
           << format_double(result.bracket->second) << '\n';
    } else {
        os << "# bracket=none\n";
    }
    os << "tcut,class,terminal_l2,error\n";
    for (const SweepEntry& e : result.entries) {
        os << format_double(e.tcut) << ',' << to_string(e.cls) << ',' << format_double(e.terminal_l2)
           << ',' << '"' << e.error << '"' << '\n';
    }
}

AttractionResult attraction_test(const ExperimentSpec& spec, const InitialSpec& u_a, const InitialSpec& v_a,
                                 const InitialSpec& u_b, const InitialSpec& v_b, double sample_every) {
    if (!(sample_every > 0.0)) throw InvalidArgument("attraction_test: sample interval must be positive");
    const PreparedMesh mesh = prepare_mesh(spec.mesh);
    ExperimentSpec base = spec;
    base.schedule.snapshot_times.clear();
    const auto samples = static_cast<long long>(std::floor(base.schedule.t_end / sample_every + 1e-9));
    for (long long k = 0; k <= samples; ++k) {
        base.schedule.snapshot_times.push_back(std::min(base.schedule.t_end, k * sample_every));
    }
    ExperimentSpec a = base;
    a.u0 = u_a;
    a.v0 = v_a;
    ExperimentSpec b = base;
    b.u0 = u_b;
    b.v0 = v_b;
    Trajectory ta;
    Trajectory tb;
    std::exception_ptr failure;
    std::thread side;
    if (worker_threads(0) > 1) {
        side = std::thread([&] {
            try {
                tb = run(b, mesh);
            } catch (...) {
                failure = std::current_exception();
            }
        });
        ta = run(a, mesh);
        side.join();
        if (failure) std::rethrow_exception(failure);
    } else {
        ta = run(a, mesh);
        tb = run(b, mesh);
    }
    AttractionResult out;
    const std::size_t n = std::min(ta.snapshots.size(), tb.snapshots.size());
    for (std::size_t k = 0; k < n; ++k) {
        out.times.push_back(ta.snapshots[k].t);
        out.distance.push_back(l2_norm(*mesh.ops, ta.snapshots[k].u - tb.snapshots[k].u) +
                               l2_norm(*mesh.ops, ta.snapshots[k].v - tb.snapshots[k].v));
    }
    return out;
}

SteadyState solve_steady_newton(const ExperimentSpec& spec, const PreparedMesh& mesh, const Field& u_guess,
                                const Field& v_guess, const NewtonOptions& options) {
    SimState s = make_state(spec, mesh);
    if (u_guess.size() != s.u.size() || v_guess.size() != s.v.size()) {
        throw InvalidArgument("Newton guess has the wrong length");
    }
    s.u = u_guess;
    s.v = v_guess;
    if (spec.tcut && *spec.tcut < spec.schedule.t_end) s.f.setZero();
    return solve_steady_newton(s, options);
}

}  // namespace gmrd
