#include "gmrd/analysis.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gmrd/errors.hpp"

namespace gmrd {

namespace {

double node_radius(const Point& p) { return std::hypot(p.x, p.y); }

void check_size(const Mesh& mesh, const Field& field, const char* what) {
    if (static_cast<std::size_t>(field.size()) != mesh.n_nodes()) {
        throw InvalidArgument(std::string(what) + ": field length does not match the mesh");
    }
}

}  // namespace

RadialBinning make_radial_binning(const Mesh& mesh, int n_bins) {
    if (n_bins < 2) throw InvalidArgument("radial binning needs at least 2 bins");
    RadialBinning out;
    out.radius = mesh.outer_radius();
    out.requested_bins = n_bins;
    if (!(out.radius > 0.0)) throw InvalidArgument("radial binning needs a mesh with positive extent");

    const double width = out.radius / n_bins;
    std::vector<int> raw(mesh.n_nodes());
    std::vector<int> count(static_cast<std::size_t>(n_bins), 0);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        int b = static_cast<int>(std::floor(node_radius(mesh.nodes()[i]) / width));
        b = std::clamp(b, 0, n_bins - 1);
        raw[i] = b;
        ++count[static_cast<std::size_t>(b)];
    }

    // Empty bins join the next non-empty bin outward.
    std::vector<int> remap(static_cast<std::size_t>(n_bins), -1);
    double pending_lower = 0.0;
    bool pending = false;
    for (int b = 0; b < n_bins; ++b) {
        const double lo = b * width;
        const double hi = b == n_bins - 1 ? out.radius : (b + 1) * width;
        if (!pending) pending_lower = lo;
        if (count[static_cast<std::size_t>(b)] == 0) {
            pending = true;
            ++out.merged_bins;
            continue;
        }
        out.lower.push_back(pending_lower);
        out.upper.push_back(hi);
        remap[static_cast<std::size_t>(b)] = static_cast<int>(out.lower.size()) - 1;
        pending = false;
    }
    if (pending && !out.upper.empty()) out.upper.back() = out.radius;

    out.bin_of_node.resize(mesh.n_nodes());
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        out.bin_of_node[i] = remap[static_cast<std::size_t>(raw[i])];
    }
    return out;
}

std::size_t RadialProfile::argmax() const {
    if (mean.empty()) throw InvalidArgument("argmax of an empty profile");
    return static_cast<std::size_t>(std::max_element(mean.begin(), mean.end()) - mean.begin());
}

double RadialProfile::peak() const { return mean[argmax()]; }

RadialProfile radial_profile(const RadialBinning& bins, const Vector& lumped_mass, const Field& field) {
    if (field.size() != lumped_mass.size() ||
        static_cast<std::size_t>(field.size()) != bins.bin_of_node.size()) {
        throw InvalidArgument("radial_profile: size mismatch");
    }
    const std::size_t nb = bins.size();
    std::vector<double> weight(nb, 0.0);
    std::vector<double> sum(nb, 0.0);
    std::vector<double> lo(nb, std::numeric_limits<double>::infinity());
    std::vector<double> hi(nb, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < bins.bin_of_node.size(); ++i) {
        const auto b = static_cast<std::size_t>(bins.bin_of_node[i]);
        const double w = lumped_mass[static_cast<Eigen::Index>(i)];
        const double x = field[static_cast<Eigen::Index>(i)];
        weight[b] += w;
        sum[b] += w * x;
        lo[b] = std::min(lo[b], x);
        hi[b] = std::max(hi[b], x);
    }
    RadialProfile out;
    out.radius = bins.radius;
    out.merged_bins = bins.merged_bins;
    for (std::size_t b = 0; b < nb; ++b) {
        out.centers.push_back(bins.center(b));
        out.mean.push_back(sum[b] / weight[b]);
        out.spread.push_back(hi[b] - lo[b]);
    }
    return out;
}

RadialProfile radial_profile(const Mesh& mesh, const Field& field, int n_bins) {
    check_size(mesh, field, "radial_profile");
    return radial_profile(make_radial_binning(mesh, n_bins), lumped_mass_diagonal(mesh), field);
}

std::vector<PhasePoint> radial_phase_curve(const Mesh& mesh, const Field& u, const Field& v, int n_bins) {
    check_size(mesh, u, "radial_phase_curve");
    check_size(mesh, v, "radial_phase_curve");
    const RadialBinning bins = make_radial_binning(mesh, n_bins);
    const Vector mass = lumped_mass_diagonal(mesh);
    const RadialProfile pu = radial_profile(bins, mass, u);
    const RadialProfile pv = radial_profile(bins, mass, v);
    std::vector<PhasePoint> curve;
    for (std::size_t k = pu.centers.size(); k-- > 0;) {
        curve.push_back({pu.centers[k], pu.mean[k], pv.mean[k]});
    }
    return curve;
}

double total_turning_angle(const std::vector<PhasePoint>& curve, double min_segment) {
    double total = 0.0;
    bool have_heading = false;
    double heading = 0.0;
    std::size_t anchor = 0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        const double du = curve[k].u - curve[anchor].u;
        const double dv = curve[k].v - curve[anchor].v;
        if (std::hypot(du, dv) <= min_segment) continue;
        const double h = std::atan2(dv, du);
        if (have_heading) {
            double turn = h - heading;
            while (turn > std::numbers::pi) turn -= 2.0 * std::numbers::pi;
            while (turn < -std::numbers::pi) turn += 2.0 * std::numbers::pi;
            total += std::abs(turn);
        }
        heading = h;
        have_heading = true;
        anchor = k;
    }
    return total;
}

std::optional<double> wavefront_radius(const RadialProfile& profile, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("wavefront_radius: fraction must lie in (0, 1)");
    }
    if (profile.mean.empty()) return std::nullopt;
    const double peak = *std::max_element(profile.mean.begin(), profile.mean.end());
    if (!(peak > 0.0)) return std::nullopt;
    for (std::size_t b = 0; b < profile.mean.size(); ++b) {
        if (profile.mean[b] >= fraction * peak) return b == 0 ? 0.0 : profile.centers[b];
    }
    return profile.radius;
}

double asymmetry_index(const RadialBinning& bins, const Field& field) {
    if (static_cast<std::size_t>(field.size()) != bins.bin_of_node.size()) {
        throw InvalidArgument("asymmetry_index: size mismatch");
    }
    if (field.size() == 0) return 0.0;
    const std::size_t nb = bins.size();
    std::vector<double> lo(nb, std::numeric_limits<double>::infinity());
    std::vector<double> hi(nb, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < bins.bin_of_node.size(); ++i) {
        const auto b = static_cast<std::size_t>(bins.bin_of_node[i]);
        const double x = field[static_cast<Eigen::Index>(i)];
        lo[b] = std::min(lo[b], x);
        hi[b] = std::max(hi[b], x);
    }
    double worst = 0.0;
    for (std::size_t b = 0; b < nb; ++b) worst = std::max(worst, hi[b] - lo[b]);
    const double range = field.maxCoeff() - field.minCoeff();
    const double eps = 1e-12 * std::max(1.0, field.lpNorm<Eigen::Infinity>());
    return worst / (range + eps);
}

double asymmetry_index(const Mesh& mesh, const Field& field, int n_bins) {
    check_size(mesh, field, "asymmetry_index");
    return asymmetry_index(make_radial_binning(mesh, n_bins), field);
}

double l2_norm(const Operators& ops, const Field& field) {
    return std::sqrt(std::max(0.0, field.dot(ops.mass.cwiseProduct(field))));
}

double h1_seminorm(const Operators& ops, const Field& field) {
    return std::sqrt(std::max(0.0, field.dot(ops.stiffness * field)));
}

double l2_norm(const Mesh& mesh, const Field& field) {
    check_size(mesh, field, "l2_norm");
    const Vector m = lumped_mass_diagonal(mesh);
    return std::sqrt(std::max(0.0, field.dot(m.cwiseProduct(field))));
}

double h1_seminorm(const Mesh& mesh, const Field& field) {
    check_size(mesh, field, "h1_seminorm");
    const SparseOperator k = assemble_stiffness(mesh);
    return std::sqrt(std::max(0.0, field.dot(k * field)));
}

RateNorms time_derivative_norms(const SimState& state) {
    const TimeDerivative rate = semi_discrete_rhs(state);
    return {l2_norm(*state.ops, rate.du), l2_norm(*state.ops, rate.dv)};
}

DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& y, double t_begin,
                        double t_end) {
    if (t.size() != y.size()) throw InvalidArgument("decay_rate_fit: size mismatch");
    if (!(t_end > t_begin)) throw InvalidArgument("decay_rate_fit: empty window");
    DecayFit fit;
    fit.t_begin = t_begin;
    fit.t_end = t_end;
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= t_begin && t[k] <= t_end) window.push_back(k);
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k : window) {
        if (y[k] > 0.0 && std::isfinite(y[k])) {
            xs.push_back(t[k]);
            ys.push_back(std::log(y[k]));
        } else {
            fit.window_shrunk = true;
        }
    }
    if (!xs.empty()) {
        fit.t_begin = xs.front();
        fit.t_end = xs.back();
    }
    fit.n_points = static_cast<int>(xs.size());
    if (xs.size() < 3) {
        fit.degenerate = true;
        return fit;
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    const double scale = std::max(1.0, std::abs(my));
    if (sxx <= 0.0 || syy <= 1e-24 * scale * scale * n) {
        fit.degenerate = true;
        return fit;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    fit.rate = -slope;
    fit.amplitude = std::exp(intercept);
    fit.r_squared = (sxy * sxy) / (sxx * syy);
    return fit;
}

DecayFit decay_rate_fit(const std::vector<Diagnostics>& timeseries, double t_begin, double t_end) {
    std::vector<double> t;
    std::vector<double> y;
    for (const Diagnostics& d : timeseries) {
        t.push_back(d.t);
        y.push_back(d.ut_l2 * d.ut_l2 + d.vt_l2 * d.vt_l2);
    }
    return decay_rate_fit(t, y, t_begin, t_end);
}

PoincareResult poincare_constant(const Mesh& mesh, const PoincareOptions& options) {
    if (mesh.boundary_nodes().empty()) throw InvalidArgument("poincare_constant: mesh has no boundary");
    const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
    const SparseOperator k_full = assemble_stiffness(mesh);
    const SparseOperator m_full = assemble_mass(mesh, options.lumped_mass);
    const Vector zero = Vector::Zero(n);
    const ConstrainedSystem k = apply_dirichlet(k_full, zero, mesh, zero);
    const ConstrainedSystem m = apply_dirichlet(m_full, zero, mesh, zero);
    if (k.free_nodes.empty()) throw InvalidArgument("poincare_constant: no interior nodes");

    Eigen::SimplicialLDLT<SparseOperator> solver(k.matrix);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("poincare_constant: stiffness factorization failed", {});
    }

    Vector x = Vector::Ones(static_cast<Eigen::Index>(k.free_nodes.size()));
    x /= std::sqrt(x.dot(m.matrix * x));
    double lambda = x.dot(k.matrix * x);
    std::vector<double> history;
    PoincareResult result;
    for (int it = 1; it <= options.max_iterations; ++it) {
        Vector y = solver.solve(m.matrix * x);
        y /= std::sqrt(y.dot(m.matrix * y));
        const double next = y.dot(k.matrix * y);
        const double change = std::abs(next - lambda) / std::abs(next);
        history.push_back(change);
        x = std::move(y);
        lambda = next;
        if (change < options.tolerance) {
            result.lambda1 = lambda;
            result.poincare_constant = 1.0 / std::sqrt(lambda);
            result.iterations = it;
            result.relative_change = change;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "inverse iteration did not reach tolerance " << options.tolerance << " in "
        << options.max_iterations << " iterations";
    throw ConvergenceError(msg.str(), std::move(history));
}

}  // namespace gmrd
