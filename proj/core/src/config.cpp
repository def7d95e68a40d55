#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "gmrd/csv.hpp"
#include "gmrd/errors.hpp"
#include "gmrd/experiment.hpp"

namespace gmrd {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

double number(const Entry& e, const std::string& key) {
    const std::string v = unquote(e.value);
    double x = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (!v.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (v.empty() || ec != std::errc() || ptr != last || !std::isfinite(x)) {
        throw ParseError(key + ": expected a number, got '" + e.value + "'", e.line);
    }
    return x;
}

double non_negative(const Entry& e, const std::string& key) {
    const double x = number(e, key);
    if (x < 0.0) throw ParseError(key + ": negative value " + e.value + " is not allowed", e.line);
    return x;
}

double positive(const Entry& e, const std::string& key) {
    const double x = non_negative(e, key);
    if (!(x > 0.0)) throw ParseError(key + ": must be positive", e.line);
    return x;
}

int count(const Entry& e, const std::string& key) {
    const double x = non_negative(e, key);
    if (x != std::floor(x) || x > 1e9) throw ParseError(key + ": expected an integer", e.line);
    return static_cast<int>(x);
}

std::vector<double> number_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(unquote(e.value));
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(non_negative({trim(item), e.line}, key));
    }
    return out;
}

using Setter = std::function<void(ExperimentSpec&, const Entry&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto pos = [&](const char* key, auto member) {
            t[key] = [member](ExperimentSpec& s, const Entry& e, const std::string& k) {
                member(s) = positive(e, k);
            };
        };
        auto nonneg = [&](const char* key, auto member) {
            t[key] = [member](ExperimentSpec& s, const Entry& e, const std::string& k) {
                member(s) = non_negative(e, k);
            };
        };
        pos("mesh.radius", [](ExperimentSpec& s) -> double& { return s.mesh.radius; });
        pos("mesh.h", [](ExperimentSpec& s) -> double& { return s.mesh.target_h; });
        t["mesh.max_nodes"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.mesh.max_nodes = static_cast<std::size_t>(count(e, k));
        };
        pos("params.a", [](ExperimentSpec& s) -> double& { return s.params.a; });
        pos("params.b", [](ExperimentSpec& s) -> double& { return s.params.b; });
        pos("params.c", [](ExperimentSpec& s) -> double& { return s.params.c; });
        pos("params.d", [](ExperimentSpec& s) -> double& { return s.params.d; });
        pos("params.mu_u", [](ExperimentSpec& s) -> double& { return s.params.mu_u; });
        pos("params.mu_v", [](ExperimentSpec& s) -> double& { return s.params.mu_v; });
        nonneg("params.h_u", [](ExperimentSpec& s) -> double& { return s.params.h_u; });
        nonneg("params.h_v", [](ExperimentSpec& s) -> double& { return s.params.h_v; });
        nonneg("params.u_bar", [](ExperimentSpec& s) -> double& { return s.params.u_bar; });
        nonneg("source.f_inner", [](ExperimentSpec& s) -> double& { return s.f.inner; });
        nonneg("source.f_outer", [](ExperimentSpec& s) -> double& { return s.f.outer; });
        nonneg("source.f_radius", [](ExperimentSpec& s) -> double& { return s.f.radius; });
        nonneg("source.g_inner", [](ExperimentSpec& s) -> double& { return s.g.inner; });
        nonneg("source.g_outer", [](ExperimentSpec& s) -> double& { return s.g.outer; });
        nonneg("source.g_radius", [](ExperimentSpec& s) -> double& { return s.g.radius; });
        nonneg("initial.u0", [](ExperimentSpec& s) -> double& { return s.u0.value; });
        nonneg("initial.v0", [](ExperimentSpec& s) -> double& { return s.v0.value; });
        t["initial.u0_bump"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.u0.bump = number(e, k);
        };
        t["initial.v0_bump"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.v0.bump = number(e, k);
        };
        t["boundary.kind"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            const std::string v = unquote(e.value);
            if (v == "robin") {
                s.boundary.kind = BoundaryKind::robin;
            } else if (v == "dirichlet") {
                s.boundary.kind = BoundaryKind::dirichlet;
            } else {
                throw ParseError(k + ": expected robin or dirichlet, got '" + v + "'", e.line);
            }
        };
        nonneg("boundary.u_b", [](ExperimentSpec& s) -> double& { return s.boundary.u_b; });
        nonneg("boundary.v_b", [](ExperimentSpec& s) -> double& { return s.boundary.v_b; });
        pos("schedule.dt", [](ExperimentSpec& s) -> double& { return s.schedule.dt; });
        pos("schedule.t_end", [](ExperimentSpec& s) -> double& { return s.schedule.t_end; });
        t["schedule.tcut"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.tcut = non_negative(e, k);
        };
        t["schedule.snapshots"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.snapshot_count = count(e, k);
        };
        t["schedule.snapshot_times"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.schedule.snapshot_times = number_list(e, k);
        };
        t["schedule.diagnostics_every"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            const int every = count(e, k);
            if (every < 1) throw ParseError(k + ": must be at least 1", e.line);
            s.schedule.diagnostics_every = every;
        };
        t["solver.integrator"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            const std::string v = unquote(e.value);
            if (v == "imex") {
                s.run.integrator = Integrator::imex;
            } else if (v == "explicit") {
                s.run.integrator = Integrator::explicit_euler;
            } else {
                throw ParseError(k + ": expected imex or explicit, got '" + v + "'", e.line);
            }
        };
        t["solver.linear_solver"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            const std::string v = unquote(e.value);
            if (v == "cholesky") {
                s.run.linear_solver = LinearSolverKind::cholesky;
            } else if (v == "cg") {
                s.run.linear_solver = LinearSolverKind::cg;
            } else {
                throw ParseError(k + ": expected cholesky or cg, got '" + v + "'", e.line);
            }
        };
        t["solver.n_bins"] = [](ExperimentSpec& s, const Entry& e, const std::string& k) {
            s.run.n_bins = count(e, k);
        };
        t["output.dir"] = [](ExperimentSpec& s, const Entry& e, const std::string&) {
            s.output_dir = unquote(e.value);
        };
        return t;
    }();
    return table;
}

const std::vector<std::string>& physical_keys() {
    static const std::vector<std::string> keys = {
        "physical.mu_a", "physical.mu_i", "physical.lambda_a", "physical.k_a", "physical.lambda_i",
        "physical.k_i",  "physical.H_a",  "physical.H_i",      "physical.L",   "physical.tau",
        "physical.u_bar", "physical.u_ref", "physical.v_ref"};
    return keys;
}

const std::vector<std::string> kRequiredParams = {"params.a", "params.b", "params.c",
                                                  "params.d", "params.mu_u", "params.mu_v"};

std::map<std::string, Entry> tokenize(const std::string& text) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("malformed section header '" + line + "'", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ParseError("empty section name", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value', got '" + line + "'", line_no);
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key before '='", line_no);
        if (value.empty()) throw ParseError(key + ": missing value", line_no);
        if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;
        if (entries.count(key)) {
            throw ParseError("duplicate key " + key + " (first set on line " +
                                 std::to_string(entries[key].line) + ")",
                             line_no);
        }
        entries[key] = {value, line_no};
    }
    return entries;
}

PhysicalParams physical_from(const std::map<std::string, Entry>& entries) {
    PhysicalParams p;
    std::map<std::string, double*> slots = {
        {"physical.mu_a", &p.mu_a},   {"physical.mu_i", &p.mu_i},       {"physical.lambda_a", &p.lambda_a},
        {"physical.k_a", &p.k_a},     {"physical.lambda_i", &p.lambda_i}, {"physical.k_i", &p.k_i},
        {"physical.H_a", &p.H_a},     {"physical.H_i", &p.H_i},         {"physical.L", &p.L},
        {"physical.tau", &p.tau},     {"physical.u_bar", &p.u_bar},     {"physical.u_ref", &p.u_ref},
        {"physical.v_ref", &p.v_ref}};
    for (const auto& [key, slot] : slots) {
        auto it = entries.find(key);
        if (it != entries.end()) *slot = non_negative(it->second, key);
    }
    for (const char* key : {"physical.mu_a", "physical.mu_i", "physical.lambda_a", "physical.k_a",
                            "physical.lambda_i", "physical.k_i"}) {
        if (!entries.count(key)) throw ParseError(std::string("missing required key ") + key, 0);
    }
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 0);
    }
    return p;
}

}  // namespace

ExperimentSpec parse_config(const std::string& text) {
    const std::map<std::string, Entry> entries = tokenize(text);

    const auto& table = setters();
    const auto& phys = physical_keys();
    bool any_physical = false;
    for (const auto& [key, entry] : entries) {
        if (key == "preset") continue;
        if (std::find(phys.begin(), phys.end(), key) != phys.end()) {
            any_physical = true;
            continue;
        }
        if (!table.count(key)) throw ParseError("unknown key " + key, entry.line);
    }

    ExperimentSpec spec;
    bool have_params = false;
    if (auto it = entries.find("preset"); it != entries.end()) {
        try {
            spec = make_preset(unquote(it->second.value));
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), it->second.line);
        }
        have_params = true;
    }
    if (any_physical) {
        spec.params = nondimensionalize(physical_from(entries));
        for (const std::string& k : kRequiredParams) spec.provenance[k] = "physical";
        for (const char* k : {"params.h_u", "params.h_v", "params.u_bar"}) spec.provenance[k] = "physical";
        have_params = true;
    }
    if (!have_params) {
        std::vector<std::string> missing;
        for (const std::string& k : kRequiredParams) {
            if (!entries.count(k)) missing.push_back(k);
        }
        if (!missing.empty()) {
            std::string list;
            for (const std::string& k : missing) list += " " + k;
            int line = entries.empty() ? 0 : entries.begin()->second.line;
            if (entries.empty()) {
                throw ParseError("missing required keys: preset, or all of" + list, 0);
            }
            throw ParseError("missing required keys without a preset:" + list, line);
        }
    }
    for (const auto& [key, entry] : entries) {
        auto it = table.find(key);
        if (it == table.end()) continue;
        it->second(spec, entry, key);
        spec.provenance[key] = "config";
    }
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 0);
    }
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

PhysicalParams parse_physical(const std::string& text) {
    const auto entries = tokenize(text);
    const auto& phys = physical_keys();
    for (const auto& [key, entry] : entries) {
        if (std::find(phys.begin(), phys.end(), key) == phys.end()) {
            throw ParseError("unknown key " + key + " (expected [physical] keys)", entry.line);
        }
    }
    return physical_from(entries);
}

void write_spec(std::ostream& os, const ExperimentSpec& spec) {
    auto src = [&](const std::string& key) {
        auto it = spec.provenance.find(key);
        return it == spec.provenance.end() ? std::string("default") : it->second;
    };
    auto line = [&](const std::string& section, const std::string& key, const std::string& value) {
        os << key << " = " << value << "  # " << src(section + "." + key) << '\n';
    };
    auto num = [](double x) { return format_double(x); };
    if (!spec.preset.empty()) os << "preset = \"" << spec.preset << "\"\n";
    os << "\n[mesh]\n";
    line("mesh", "radius", num(spec.mesh.radius));
    line("mesh", "h", num(spec.mesh.target_h));
    line("mesh", "max_nodes", std::to_string(spec.mesh.max_nodes));
    os << "\n[params]\n";
    line("params", "a", num(spec.params.a));
    line("params", "b", num(spec.params.b));
    line("params", "c", num(spec.params.c));
    line("params", "d", num(spec.params.d));
    line("params", "mu_u", num(spec.params.mu_u));
    line("params", "mu_v", num(spec.params.mu_v));
    line("params", "h_u", num(spec.params.h_u));
    line("params", "h_v", num(spec.params.h_v));
    line("params", "u_bar", num(spec.params.u_bar));
    os << "\n[source]\n";
    line("source", "f_inner", num(spec.f.inner));
    line("source", "f_outer", num(spec.f.outer));
    line("source", "f_radius", num(spec.f.radius));
    line("source", "g_inner", num(spec.g.inner));
    line("source", "g_outer", num(spec.g.outer));
    line("source", "g_radius", num(spec.g.radius));
    os << "\n[initial]\n";
    line("initial", "u0", num(spec.u0.value));
    line("initial", "v0", num(spec.v0.value));
    line("initial", "u0_bump", num(spec.u0.bump));
    line("initial", "v0_bump", num(spec.v0.bump));
    os << "\n[boundary]\n";
    line("boundary", "kind", to_string(spec.boundary.kind));
    line("boundary", "u_b", num(spec.boundary.u_b));
    line("boundary", "v_b", num(spec.boundary.v_b));
    os << "\n[schedule]\n";
    line("schedule", "dt", num(spec.schedule.dt));
    line("schedule", "t_end", num(spec.schedule.t_end));
    if (spec.tcut) line("schedule", "tcut", num(*spec.tcut));
    line("schedule", "snapshots", std::to_string(spec.snapshot_count));
    if (!spec.schedule.snapshot_times.empty()) {
        std::string list;
        for (double t : spec.schedule.snapshot_times) list += (list.empty() ? "" : ",") + num(t);
        line("schedule", "snapshot_times", "\"" + list + "\"");
    }
    line("schedule", "diagnostics_every", std::to_string(spec.schedule.diagnostics_every));
    os << "\n[solver]\n";
    line("solver", "integrator", to_string(spec.run.integrator));
    line("solver", "linear_solver", to_string(spec.run.linear_solver));
    line("solver", "n_bins", std::to_string(spec.run.n_bins));
    os << "\n[output]\n";
    line("output", "dir", "\"" + spec.output_dir + "\"");
}

}  // namespace gmrd
