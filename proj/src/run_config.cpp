#include "ascal/run_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ascal/errors.hpp"

namespace ascal {

namespace {

const double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(long line, const std::string& msg) {
    throw ConfigError(msg, line);  // ConfigError adds the line prefix
}

double parse_double(const std::string& where, const std::string& raw, long line) {
    const std::string v = trim(raw);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    const bool overflow = errno == ERANGE && (x == HUGE_VAL || x == -HUGE_VAL);
    if (v.empty() || end != v.c_str() + v.size() || overflow)
        fail(line, where + " expects a number, got \"" + trim(raw) + "\"");
    if (std::isnan(x)) fail(line, where + " must not be nan");
    return x;
}

long parse_int(const std::string& where, const std::string& raw, long line) {
    const std::string v = trim(raw);
    char* end = nullptr;
    errno = 0;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
        fail(line, where + " expects an integer, got \"" + trim(raw) + "\"");
    return x;
}

bool parse_bool(const std::string& where, const std::string& raw, long line) {
    const std::string v = trim(raw);
    if (v == "true") return true;
    if (v == "false") return false;
    fail(line, where + " expects true or false, got \"" + v + "\"");
}

std::vector<std::string> split_commas(const std::string& raw) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = raw.find(',', start);
        out.push_back(trim(raw.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& where, const std::string& raw, long line) {
    std::vector<double> out;
    for (const auto& tok : split_commas(raw)) out.push_back(parse_double(where, tok, line));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& where, const std::string& raw, long line) {
    std::vector<std::size_t> out;
    for (const auto& tok : split_commas(raw)) {
        const long v = parse_int(where, tok, line);
        if (v <= 0) fail(line, where + " entries must be positive (got " + std::to_string(v) + ")");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(xs[i]);
    }
    return out;
}

const char* const kKinds[] = {"simulate",     "decay",      "scaling",  "symmetry",
                              "picard",       "dependence", "smoothing", "probe"};

bool known_kind(const std::string& k) {
    for (const char* s : kKinds)
        if (k == s) return true;
    return false;
}

}  // namespace

Grid default_grid() { return make_grid(2, {256}, {16.0 * kPi}); }

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;

    // Raw pieces gathered first; the grid and coupling are assembled at the
    // end so list broadcasting and cross-section checks see final values.
    int dims = 2;
    std::vector<std::size_t> points{256};
    std::vector<double> side{16.0 * kPi};
    std::vector<double> origin;
    std::string family = "sqg";
    std::string preset;
    double beta = 1.0, sigma = 1.0, chi = 1.0, epsilon = 0.05;
    bool beta_set = false;
    std::vector<double> matrix;

    // Line anchors for messages raised after the scan.
    long grid_line = -1, dims_line = -1, gamma_line = -1, kappa_line = -1;
    long family_line = -1, preset_line = -1, coupling_line = -1, matrix_line = -1;
    long time_line = -1, dt_line = -1, t_end_line = -1;
    long kind_line = -1, q_line = -1, lambda_line = -1;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header \"" + s + "\"");
            section = trim(s.substr(1, s.size() - 2));
            if (section == "grid") grid_line = line;
            else if (section == "coupling") coupling_line = line;
            else if (section == "time") time_line = line;
            else if (section != "equation" && section != "study" && section != "output")
                fail(line, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value, got \"" + s + "\"");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(line, "empty key before '='");
        if (section.empty()) fail(line, "key \"" + key + "\" appears before any [section] header");
        const std::string where = section + "." + key;

        if (section == "grid") {
            if (key == "dims") { dims = static_cast<int>(parse_int(where, value, line)); dims_line = line; }
            else if (key == "points") points = parse_size_list(where, value, line);
            else if (key == "side_length") side = parse_double_list(where, value, line);
            else if (key == "origin") origin = parse_double_list(where, value, line);
            else fail(line, "unknown key " + where);
        } else if (section == "equation") {
            if (key == "gamma") { cfg.solver.gamma = parse_double(where, value, line); gamma_line = line; }
            else if (key == "kappa") { cfg.solver.kappa = parse_double(where, value, line); kappa_line = line; }
            else fail(line, "unknown key " + where);
        } else if (section == "coupling") {
            if (key == "family") { family = value; family_line = line; }
            else if (key == "preset") { preset = value; preset_line = line; }
            else if (key == "beta") { beta = parse_double(where, value, line); beta_set = true; }
            else if (key == "sigma") sigma = parse_double(where, value, line);
            else if (key == "chi") chi = parse_double(where, value, line);
            else if (key == "epsilon") epsilon = parse_double(where, value, line);
            else if (key == "matrix") { matrix = parse_double_list(where, value, line); matrix_line = line; }
            else fail(line, "unknown key " + where);
        } else if (section == "time") {
            if (key == "dt") { cfg.solver.dt = parse_double(where, value, line); dt_line = line; }
            else if (key == "t_end") { cfg.solver.t_end = parse_double(where, value, line); t_end_line = line; }
            else if (key == "integrator") {
                try {
                    cfg.solver.integrator = integrator_from_name(value);
                } catch (const ValidationError& e) {
                    fail(line, where + ": " + e.what());
                }
            } else if (key == "dealias") cfg.solver.dealias = parse_bool(where, value, line);
            else if (key == "snapshot_every") {
                const long v = parse_int(where, value, line);
                if (v < 0) fail(line, where + " must be >= 0");
                cfg.solver.snapshot_every = static_cast<std::size_t>(v);
            } else if (key == "diagnostics_every") {
                const long v = parse_int(where, value, line);
                if (v < 0) fail(line, where + " must be >= 0");
                cfg.solver.diagnostics_every = static_cast<std::size_t>(v);
            } else fail(line, "unknown key " + where);
        } else if (section == "study") {
            if (key == "kind") { cfg.study.kind = value; kind_line = line; }
            else if (key == "q_list") { cfg.study.q_list = parse_double_list(where, value, line); q_line = line; }
            else if (key == "lambda") { cfg.study.lambda = static_cast<int>(parse_int(where, value, line)); lambda_line = line; }
            else if (key == "amplitudes") cfg.study.amplitudes = parse_double_list(where, value, line);
            else if (key == "perturbations") cfg.study.perturbations = parse_double_list(where, value, line);
            else if (key == "with_l1") cfg.study.with_l1 = parse_bool(where, value, line);
            else if (key == "datum") cfg.study.datum = value;
            else fail(line, "unknown key " + where);
        } else {  // output
            if (key == "directory") cfg.output.directory = value;
            else if (key == "prefix") cfg.output.prefix = value;
            else fail(line, "unknown key " + where);
        }
    }

    // grid
    if (dims != 2 && dims != 3)
        fail(dims_line, "grid.dims must be 2 or 3 (got " + std::to_string(dims) + ")");
    try {
        cfg.grid = make_grid(dims, points, side, origin);
    } catch (const ValidationError& e) {
        fail(grid_line, std::string("grid: ") + e.what());
    }

    // equation
    if (!(cfg.solver.gamma > 0.0) || !std::isfinite(cfg.solver.gamma))
        fail(gamma_line, "equation.gamma must be positive (got " + fmt(cfg.solver.gamma) + ")");
    if (!(cfg.solver.kappa > 0.0) || !std::isfinite(cfg.solver.kappa))
        fail(kappa_line, "equation.kappa must be positive (got " + fmt(cfg.solver.kappa) + ")");

    // coupling
    CouplingSpec spec;
    try {
        switch (family_from_name(family)) {
            case CouplingFamily::sqg: spec = sqg_spec(); break;
            case CouplingFamily::modified_sqg: spec = modified_sqg_spec(beta); break;
            case CouplingFamily::log_field: spec = log_field_spec(chi, epsilon); break;
            case CouplingFamily::log_power: spec = log_power_spec(sigma, chi, epsilon); break;
            case CouplingFamily::loglog_power: spec = loglog_power_spec(sigma, chi, epsilon); break;
            case CouplingFamily::custom:
                if (preset.empty())
                    fail(family_line, "coupling.preset is required when coupling.family = custom");
                spec = custom_preset(preset, dims);
                if (beta_set) spec.beta = beta;
                break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        fail(preset.empty() ? family_line : preset_line, "coupling: " + std::string(e.what()));
    }
    spec.sigma = sigma;
    spec.chi = chi;
    spec.epsilon = epsilon;
    if (!matrix.empty()) spec.matrix_a = matrix;
    if (spec.family != CouplingFamily::custom && dims == 3)
        fail(family_line, "coupling.family \"" + family +
                              "\" uses the 2-d perp matrix; a 3-d grid needs coupling.family = custom");
    try {
        validate_coupling(spec, dims);
    } catch (const ValidationError& e) {
        fail(matrix.empty() ? coupling_line : matrix_line, "coupling: " + std::string(e.what()));
    }
    cfg.coupling = std::move(spec);

    // time
    if (!(cfg.solver.dt > 0.0) || !std::isfinite(cfg.solver.dt))
        fail(dt_line, "time.dt must be positive (got " + fmt(cfg.solver.dt) + ")");
    if (!(cfg.solver.t_end > cfg.solver.dt))
        fail(t_end_line, "time.t_end must exceed time.dt (got " + fmt(cfg.solver.t_end) + ")");
    try {
        validate_solver(cfg.solver);
    } catch (const ValidationError& e) {
        fail(time_line, "time: " + std::string(e.what()));
    }

    // study
    if (!known_kind(cfg.study.kind)) {
        std::string names;
        for (const char* s : kKinds) {
            if (!names.empty()) names += ", ";
            names += s;
        }
        fail(kind_line, "study.kind \"" + cfg.study.kind + "\" is not one of: " + names);
    }
    if (cfg.study.q_list.empty()) fail(q_line, "study.q_list must not be empty");
    for (double q : cfg.study.q_list)
        if (!(q >= 1.0)) fail(q_line, "study.q_list entries must lie in [1, inf] (got " + fmt(q) + ")");
    if (cfg.study.lambda < 2)
        fail(lambda_line, "study.lambda must be an integer >= 2 (got " + std::to_string(cfg.study.lambda) + ")");
    for (double a : cfg.study.amplitudes)
        if (!(a > 0.0) || !std::isfinite(a)) fail(-1, "study.amplitudes entries must be positive");
    for (double p : cfg.study.perturbations)
        if (!(p > 0.0) || !std::isfinite(p)) fail(-1, "study.perturbations entries must be positive");
    if (cfg.study.datum.empty()) fail(-1, "study.datum must not be empty");

    // output
    if (cfg.output.directory.empty()) fail(-1, "output.directory must not be empty");
    if (cfg.output.prefix.empty() || cfg.output.prefix.find('/') != std::string::npos)
        fail(-1, "output.prefix must be a non-empty file-name component");

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config(body.str());
}

std::string echo_config(const RunConfig& config) {
    const Grid& g = config.grid;
    const SolverConfig& s = config.solver;
    const CouplingSpec& c = config.coupling;
    std::ostringstream out;

    out << "[grid]\n";
    out << "dims = " << g.n_dims << "\n";
    out << "points = ";
    for (int a = 0; a < g.n_dims; ++a) out << (a ? ", " : "") << g.points[a];
    out << "\nside_length = ";
    for (int a = 0; a < g.n_dims; ++a) out << (a ? ", " : "") << fmt(g.side[a]);
    out << "\norigin = ";
    for (int a = 0; a < g.n_dims; ++a) out << (a ? ", " : "") << fmt(g.origin[a]);
    out << "\n\n[equation]\n";
    out << "gamma = " << fmt(s.gamma) << "\n";
    out << "kappa = " << fmt(s.kappa) << "\n";

    out << "\n[coupling]\n";
    out << "family = " << family_name(c.family) << "\n";
    if (!c.custom_name.empty()) out << "preset = " << c.custom_name << "\n";
    out << "beta = " << fmt(c.beta) << "\n";
    out << "sigma = " << fmt(c.sigma) << "\n";
    out << "chi = " << fmt(c.chi) << "\n";
    out << "epsilon = " << fmt(c.epsilon) << "\n";
    if (!c.matrix_a.empty()) out << "matrix = " << join(c.matrix_a) << "\n";

    out << "\n[time]\n";
    out << "dt = " << fmt(s.dt) << "\n";
    out << "t_end = " << fmt(s.t_end) << "\n";
    out << "integrator = " << integrator_name(s.integrator) << "\n";
    out << "dealias = " << (s.dealias ? "true" : "false") << "\n";
    out << "snapshot_every = " << s.snapshot_every << "\n";
    out << "diagnostics_every = " << s.diagnostics_every << "\n";

    out << "\n[study]\n";
    out << "kind = " << config.study.kind << "\n";
    out << "q_list = " << join(config.study.q_list) << "\n";
    out << "lambda = " << config.study.lambda << "\n";
    out << "amplitudes = " << join(config.study.amplitudes) << "\n";
    out << "perturbations = " << join(config.study.perturbations) << "\n";
    out << "with_l1 = " << (config.study.with_l1 ? "true" : "false") << "\n";
    out << "datum = " << config.study.datum << "\n";

    out << "\n[output]\n";
    out << "directory = " << config.output.directory << "\n";
    out << "prefix = " << config.output.prefix << "\n";
    return out.str();
}

}  // namespace ascal
