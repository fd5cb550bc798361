#include "rbh/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rbh/errors.hpp"

namespace rbh {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ", key '" + key + "': " + what);
}

double to_double(const std::string& key, int line, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        fail(key, line, "expected a number, got '" + v + "'");
    }
    if (used != v.size()) fail(key, line, "expected a number, got '" + v + "'");
    return d;
}

long long to_int(const std::string& key, int line, const std::string& v) {
    long long i = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(key, line, "expected an integer, got '" + v + "'");
    return i;
}

bool to_bool(const std::string& key, int line, const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    fail(key, line, "expected on/off, got '" + v + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig c;
    using Setter = std::function<void(const std::string&, int, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"microstructure",
         [&](auto&, int, const std::string& v) {
             std::filesystem::path p(v);
             c.microstructure = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
         }},
        {"output_dir", [&](auto&, int, const std::string& v) { c.output_dir = v; }},
        {"J_min", [&](auto& k, int l, const std::string& v) { c.sampling.J_min = to_double(k, l, v); }},
        {"J_max", [&](auto& k, int l, const std::string& v) { c.sampling.J_max = to_double(k, l, v); }},
        {"t_max", [&](auto& k, int l, const std::string& v) { c.sampling.t_max = to_double(k, l, v); }},
        {"N_det", [&](auto& k, int l, const std::string& v) { c.sampling.N_det = static_cast<int>(to_int(k, l, v)); }},
        {"N_dir", [&](auto& k, int l, const std::string& v) { c.sampling.N_dir = static_cast<int>(to_int(k, l, v)); }},
        {"N_amp", [&](auto& k, int l, const std::string& v) { c.sampling.N_amp = static_cast<int>(to_int(k, l, v)); }},
        {"spacing",
         [&](auto& k, int l, const std::string& v) {
             if (v == "uniform") c.sampling.spacing = AmplitudeSpacing::uniform;
             else if (v == "adaptive") c.sampling.spacing = AmplitudeSpacing::adaptive;
             else fail(k, l, "expected uniform or adaptive, got '" + v + "'");
         }},
        {"include_zero", [&](auto& k, int l, const std::string& v) { c.sampling.include_zero = to_bool(k, l, v); }},
        {"seed", [&](auto& k, int l, const std::string& v) { c.sampling.seed = static_cast<std::uint64_t>(to_int(k, l, v)); }},
        {"volumetric_levels", [&](auto& k, int l, const std::string& v) { c.volumetric_levels = static_cast<int>(to_int(k, l, v)); }},
        {"fom_increments", [&](auto& k, int l, const std::string& v) { c.fom.increments = static_cast<int>(to_int(k, l, v)); }},
        {"fom_rel_tol", [&](auto& k, int l, const std::string& v) { c.fom.rel_tol = to_double(k, l, v); }},
        {"fom_max_newton", [&](auto& k, int l, const std::string& v) { c.fom.max_newton = static_cast<int>(to_int(k, l, v)); }},
        {"fom_max_cutbacks", [&](auto& k, int l, const std::string& v) { c.fom.max_cutbacks = static_cast<int>(to_int(k, l, v)); }},
        {"fom_linear_solver",
         [&](auto& k, int l, const std::string& v) {
             if (v == "cholesky") c.fom.linear_solver = LinearSolverKind::cholesky;
             else if (v == "cg") c.fom.linear_solver = LinearSolverKind::conjugate_gradient;
             else fail(k, l, "expected cholesky or cg, got '" + v + "'");
         }},
        {"fom_cg_tol", [&](auto& k, int l, const std::string& v) { c.fom.cg_tol = to_double(k, l, v); }},
        {"pod_N", [&](auto& k, int l, const std::string& v) { c.pod.N = static_cast<int>(to_int(k, l, v)); }},
        {"pod_energy_tol", [&](auto& k, int l, const std::string& v) { c.pod.energy_tol = to_double(k, l, v); }},
        {"validation_N_dir", [&](auto& k, int l, const std::string& v) { c.validation_N_dir = static_cast<int>(to_int(k, l, v)); }},
        {"validation_seed", [&](auto& k, int l, const std::string& v) { c.validation_seed = static_cast<std::uint64_t>(to_int(k, l, v)); }},
        {"validation_compression", [&](auto& k, int l, const std::string& v) { c.validation_compression = to_double(k, l, v); }},
        {"validation_N",
         [&](auto& k, int l, const std::string& v) {
             c.validation_N.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) c.validation_N.push_back(static_cast<int>(to_int(k, l, trim(item))));
         }},
        {"rb_rel_tol", [&](auto& k, int l, const std::string& v) { c.rb.rel_tol = to_double(k, l, v); }},
        {"rb_max_iterations", [&](auto& k, int l, const std::string& v) { c.rb.max_iterations = static_cast<int>(to_int(k, l, v)); }},
        {"rb_max_assemblies", [&](auto& k, int l, const std::string& v) { c.rb.max_assemblies = static_cast<int>(to_int(k, l, v)); }},
        {"rb_increments", [&](auto& k, int l, const std::string& v) { c.rb.increments = static_cast<int>(to_int(k, l, v)); }},
        {"cutoff", [&](auto& k, int l, const std::string& v) { c.cutoff.enabled = to_bool(k, l, v); }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) fail(key, lineno, "unknown key");
        if (value.empty()) fail(key, lineno, "missing value");
        it->second(key, lineno, value);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

void validate(const RunConfig& c) {
    auto bad = [](const std::string& key, const std::string& what) { throw ConfigError("key '" + key + "': " + what); };
    if (c.microstructure.empty()) bad("microstructure", "required");
    if (!std::filesystem::exists(c.microstructure)) bad("microstructure", "file not found: " + c.microstructure.string());
    const PlanInputs& s = c.sampling;
    if (!(s.t_max > 0.0)) bad("t_max", "must be positive");
    if (s.N_det < 1) bad("N_det", "must be positive");
    if (s.N_dir < 1) bad("N_dir", "must be positive");
    if (s.N_amp < 1) bad("N_amp", "must be positive");
    if (!(s.J_min > 0.0) || s.J_min > 1.0) bad("J_min", "must lie in (0, 1]");
    if (s.J_max < 1.0) bad("J_max", "must be >= 1");
    if ((s.N_det > 1 || c.volumetric_levels > 1) && !(s.J_min < s.J_max)) bad("J_max", "must exceed J_min");
    if (c.volumetric_levels < 0) bad("volumetric_levels", "must be >= 0");
    if (c.fom.increments < 1) bad("fom_increments", "must be positive");
    if (!(c.fom.rel_tol > 0.0)) bad("fom_rel_tol", "must be positive");
    if (c.fom.max_newton < 1) bad("fom_max_newton", "must be positive");
    if (c.fom.max_cutbacks < 0) bad("fom_max_cutbacks", "must be >= 0");
    if (c.pod.N < 0) bad("pod_N", "must be >= 0");
    if (c.pod.N == 0 && !(c.pod.energy_tol > 0.0 && c.pod.energy_tol < 1.0)) bad("pod_energy_tol", "must lie in (0, 1)");
    if (c.validation_N_dir < 1) bad("validation_N_dir", "must be positive");
    if (!(c.validation_compression >= 0.0 && c.validation_compression < 1.0)) {
        bad("validation_compression", "must lie in [0, 1)");
    }
    if (c.validation_N.empty()) bad("validation_N", "needs at least one basis size");
    for (int n : c.validation_N)
        if (n < 1) bad("validation_N", "basis sizes must be positive");
    if (!(c.rb.rel_tol > 0.0)) bad("rb_rel_tol", "must be positive");
    if (c.rb.max_iterations < 1) bad("rb_max_iterations", "must be positive");
    if (c.rb.max_assemblies < 1) bad("rb_max_assemblies", "must be positive");
    if (c.rb.increments < 1) bad("rb_increments", "must be positive");
}

SamplingPlan training_plan(const RunConfig& c) {
    SamplingPlan plan = build_plan(c.sampling);
    if (c.volumetric_levels > 0) {
        plan = concat(plan, volumetric_plan(c.sampling.J_min, c.sampling.J_max, c.volumetric_levels));
    }
    return plan;
}

SamplingPlan validation_plan(const RunConfig& c) {
    SamplingPlan plan;
    plan.directions = uniform_directions(c.validation_N_dir, c.validation_seed, c.sampling.directions);
    plan.amplitudes =
        deviatoric_amplitudes(c.sampling.t_max, c.sampling.N_amp, c.sampling.spacing, c.sampling.include_zero);
    const double J = 1.0 - c.validation_compression;
    plan.J_levels = {J};
    for (const Vec5& N : plan.directions)
        for (double t : plan.amplitudes) plan.entries.push_back(PlanEntry{J, t, N, stretch_from(J, t, N)});
    return plan;
}

}  // namespace rbh
