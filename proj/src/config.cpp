#include "gme/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace gme {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& where, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ValidationError(where + ": cannot parse '" + v + "' as a number");
    return x;
}

int parse_int(const std::string& where, const std::string& v) {
    const double x = parse_double(where, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ValidationError(where + ": expected an integer, got '" + v + "'");
    return i;
}

bool parse_bool(const std::string& where, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(where + ": expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& where, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split(v, ','))
        if (!item.empty()) out.push_back(parse_double(where, item));
    if (out.empty()) throw ValidationError(where + ": empty list");
    return out;
}

Eigen::MatrixXd list_to_matrix(const std::string& where, const std::vector<double>& v,
                               int n) {
    if (static_cast<int>(v.size()) != n * n)
        throw ValidationError(where + ": expected " + std::to_string(n * n) +
                              " row-major entries");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
    return m;
}

const std::map<std::string, std::vector<std::string>> kKnownKeys = {
    {"model",
     {"n_modes", "eps", "eps1", "eps2", "delta", "J_re", "J_im", "Delta_re",
      "Delta_im", "coupled_sites", "initial_state"}},
    {"bath",
     {"gamma", "lambda", "oracle_modes", "oracle_window_factor", "quality_tol"}},
    {"grid", {"t_max", "n_steps"}},
    {"solver",
     {"dyson_tol", "max_order", "theta_ordered", "theta_self_energy",
      "project_each_step", "physicality_tol", "refine_midpoints", "check_residual"}},
    {"run",
     {"modes", "output", "sweep", "sweep_values", "sweep_jobs", "compare_max_tol",
      "compare_rms_tol", "dump_kernels"}},
};

}  // namespace

SimulationConfig::SimulationConfig() {
    model.n_modes = 2;
    model.hopping = Eigen::MatrixXcd::Zero(2, 2);
    model.hopping(0, 0) = 0.5;
    model.hopping(1, 1) = 1.0;
    model.pairing = Eigen::MatrixXcd::Zero(2, 2);
    model.pairing(0, 1) = 0.7;
    model.pairing(1, 0) = -0.7;
    model.coupled_sites = {0, 1};
}

void SimulationConfig::validate() const {
    model.validate();
    bath.validate();
    if (grid.n_steps < 10) throw ValidationError("grid.n_steps: must be >= 10");
    if (!(grid.t_max > 0.0)) throw ValidationError("grid.t_max: must be > 0");
    if (!(dyson_tol > 0.0)) throw ValidationError("solver.dyson_tol: must be > 0");
    if (max_order < 1) throw ValidationError("solver.max_order: must be >= 1");
    if (oracle_modes < 2) throw ValidationError("bath.oracle_modes: must be >= 2");
    if (!(oracle_window_factor > 0.0))
        throw ValidationError("bath.oracle_window_factor: must be > 0");
    if (!(bath_quality_tol > 0.0))
        throw ValidationError("bath.quality_tol: must be > 0");
    if (modes.empty()) throw ValidationError("run.modes: must not be empty");
    for (const auto& m : modes)
        if (m != "gme" && m != "redfield" && m != "oracle")
            throw ValidationError("run.modes: unknown mode '" + m + "'");
    if (!sweep_axis.empty() && sweep_axis != "gamma")
        throw ValidationError("run.sweep: only 'gamma' is supported");
    if (!sweep_axis.empty() && sweep_values.empty())
        throw ValidationError("run.sweep_values: required when sweeping");
    for (double v : sweep_values)
        if (!(v >= 0.0)) throw ValidationError("run.sweep_values: values must be >= 0");
    if (sweep_jobs < 1) throw ValidationError("run.sweep_jobs: must be >= 1");
    if (initial_state == StateSpec::BellPair && model.n_modes < 2)
        throw ValidationError("model.initial_state: bell-pair needs >= 2 modes");
}

SimulationConfig parse_config_text(const std::string& text) {
    // Pass 1: collect raw section/key/value triples and reject unknown names.
    std::map<std::string, std::map<std::string, std::string>> raw;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (kKnownKeys.find(section) == kKnownKeys.end())
                throw ValidationError("[" + section + "]: unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        if (section.empty())
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& known = kKnownKeys.at(section);
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError(section + "." + key + ": unknown key");
        if (!raw[section].insert({key, value}).second)
            throw ValidationError(section + "." + key + ": duplicate key");
    }

    SimulationConfig cfg;
    auto has = [&raw](const char* sec, const char* key) {
        const auto s = raw.find(sec);
        return s != raw.end() && s->second.count(key) > 0;
    };
    auto get = [&raw](const char* sec, const char* key) {
        return raw.at(sec).at(key);
    };

    // --- model ---
    const int n = has("model", "n_modes")
                      ? parse_int("model.n_modes", get("model", "n_modes"))
                      : 2;
    if (n < 1) throw ValidationError("model.n_modes: must be >= 1");

    const bool has_matrix = has("model", "J_re") || has("model", "J_im") ||
                            has("model", "Delta_re") || has("model", "Delta_im");
    const bool has_short = has("model", "eps") || has("model", "eps1") ||
                           has("model", "eps2") || has("model", "delta");
    if (has_matrix && has_short)
        throw ValidationError(
            "model: matrix entries (J_re/...) conflict with the eps/delta shorthand");

    if (has_matrix) {
        Eigen::MatrixXd jr = Eigen::MatrixXd::Zero(n, n), ji = jr, dr = jr, di = jr;
        if (has("model", "J_re"))
            jr = list_to_matrix("model.J_re", parse_list("model.J_re", get("model", "J_re")), n);
        if (has("model", "J_im"))
            ji = list_to_matrix("model.J_im", parse_list("model.J_im", get("model", "J_im")), n);
        if (has("model", "Delta_re"))
            dr = list_to_matrix("model.Delta_re",
                                parse_list("model.Delta_re", get("model", "Delta_re")), n);
        if (has("model", "Delta_im"))
            di = list_to_matrix("model.Delta_im",
                                parse_list("model.Delta_im", get("model", "Delta_im")), n);
        cfg.model.hopping = jr.cast<complexd>() + complexd(0, 1) * ji.cast<complexd>();
        cfg.model.pairing = dr.cast<complexd>() + complexd(0, 1) * di.cast<complexd>();
    } else {
        std::vector<double> eps;
        if (has("model", "eps")) {
            eps = parse_list("model.eps", get("model", "eps"));
        } else if (n == 2) {
            eps = {0.5, 1.0};  // two-dot defaults
            if (has("model", "eps1")) eps[0] = parse_double("model.eps1", get("model", "eps1"));
            if (has("model", "eps2")) eps[1] = parse_double("model.eps2", get("model", "eps2"));
        } else {
            throw ValidationError(
                "model.eps: required when n_modes != 2 and no matrix entries are given");
        }
        if ((has("model", "eps1") || has("model", "eps2")) && n != 2)
            throw ValidationError("model.eps1: shorthand is for n_modes = 2 only");
        if (static_cast<int>(eps.size()) != n)
            throw ValidationError("model.eps: expected " + std::to_string(n) + " entries");
        cfg.model.hopping = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) cfg.model.hopping(i, i) = eps[i];
        cfg.model.pairing = Eigen::MatrixXcd::Zero(n, n);
        double delta = (n == 2) ? 0.7 : 0.0;
        if (has("model", "delta")) {
            if (n != 2)
                throw ValidationError("model.delta: shorthand is for n_modes = 2 only");
            delta = parse_double("model.delta", get("model", "delta"));
        }
        if (n >= 2) {
            cfg.model.pairing(0, 1) = delta;
            cfg.model.pairing(1, 0) = -delta;
        }
    }
    cfg.model.n_modes = n;

    cfg.model.coupled_sites.clear();
    if (has("model", "coupled_sites")) {
        for (double v : parse_list("model.coupled_sites", get("model", "coupled_sites"))) {
            const int site = static_cast<int>(v);
            if (static_cast<double>(site) != v || site < 1 || site > n)
                throw ValidationError("model.coupled_sites: sites are 1-based in [1, n]");
            cfg.model.coupled_sites.push_back(site - 1);
        }
    } else {
        for (int i = 0; i < n; ++i) cfg.model.coupled_sites.push_back(i);
    }

    if (has("model", "initial_state")) {
        const std::string s = get("model", "initial_state");
        if (s == "vacuum") cfg.initial_state = StateSpec::Vacuum;
        else if (s == "occupied") cfg.initial_state = StateSpec::FullyOccupied;
        else if (s == "bell-pair") cfg.initial_state = StateSpec::BellPair;
        else throw ValidationError("model.initial_state: unknown state '" + s + "'");
    }

    // --- bath ---
    if (has("bath", "gamma")) cfg.bath.gamma = parse_double("bath.gamma", get("bath", "gamma"));
    if (has("bath", "lambda")) cfg.bath.lambda = parse_double("bath.lambda", get("bath", "lambda"));
    if (has("bath", "oracle_modes"))
        cfg.oracle_modes = parse_int("bath.oracle_modes", get("bath", "oracle_modes"));
    if (has("bath", "oracle_window_factor"))
        cfg.oracle_window_factor =
            parse_double("bath.oracle_window_factor", get("bath", "oracle_window_factor"));
    if (has("bath", "quality_tol"))
        cfg.bath_quality_tol = parse_double("bath.quality_tol", get("bath", "quality_tol"));

    // --- grid ---
    double t_max = cfg.grid.t_max;
    int n_steps = cfg.grid.n_steps;
    if (has("grid", "t_max")) t_max = parse_double("grid.t_max", get("grid", "t_max"));
    if (has("grid", "n_steps")) n_steps = parse_int("grid.n_steps", get("grid", "n_steps"));
    if (n_steps < 10) throw ValidationError("grid.n_steps: must be >= 10");
    cfg.grid = TimeGrid(t_max, n_steps);

    // --- solver ---
    if (has("solver", "dyson_tol"))
        cfg.dyson_tol = parse_double("solver.dyson_tol", get("solver", "dyson_tol"));
    if (has("solver", "max_order"))
        cfg.max_order = parse_int("solver.max_order", get("solver", "max_order"));
    if (has("solver", "theta_ordered"))
        cfg.conventions.theta_zero_ordered =
            parse_double("solver.theta_ordered", get("solver", "theta_ordered"));
    if (has("solver", "theta_self_energy"))
        cfg.conventions.theta_zero_self_energy =
            parse_double("solver.theta_self_energy", get("solver", "theta_self_energy"));
    if (has("solver", "project_each_step"))
        cfg.integration.project_each_step =
            parse_bool("solver.project_each_step", get("solver", "project_each_step"));
    if (has("solver", "physicality_tol"))
        cfg.integration.physicality_tol =
            parse_double("solver.physicality_tol", get("solver", "physicality_tol"));
    if (has("solver", "refine_midpoints"))
        cfg.refine_midpoints =
            parse_bool("solver.refine_midpoints", get("solver", "refine_midpoints"));
    if (has("solver", "check_residual"))
        cfg.check_residual = parse_bool("solver.check_residual", get("solver", "check_residual"));

    // --- run ---
    if (has("run", "modes")) {
        cfg.modes.clear();
        for (const auto& m : split(get("run", "modes"), ','))
            if (!m.empty()) cfg.modes.push_back(m);
    }
    if (has("run", "output")) cfg.output_dir = get("run", "output");
    if (has("run", "sweep")) {
        const std::string s = get("run", "sweep");
        cfg.sweep_axis = (s == "none") ? "" : s;
    }
    if (has("run", "sweep_values"))
        cfg.sweep_values = parse_list("run.sweep_values", get("run", "sweep_values"));
    if (has("run", "sweep_jobs"))
        cfg.sweep_jobs = parse_int("run.sweep_jobs", get("run", "sweep_jobs"));
    if (has("run", "compare_max_tol"))
        cfg.compare_max_tol = parse_double("run.compare_max_tol", get("run", "compare_max_tol"));
    if (has("run", "compare_rms_tol"))
        cfg.compare_rms_tol = parse_double("run.compare_rms_tol", get("run", "compare_rms_tol"));
    if (has("run", "dump_kernels"))
        cfg.dump_kernels = parse_bool("run.dump_kernels", get("run", "dump_kernels"));

    cfg.validate();
    return cfg;
}

SimulationConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string matrix_list(const Eigen::MatrixXd& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (!out.empty()) out += ",";
            out += fmt(m(i, j));
        }
    return out;
}

}  // namespace

void write_effective_config(const SimulationConfig& cfg, std::ostream& os) {
    os << "[model]\n";
    os << "n_modes = " << cfg.model.n_modes << "\n";
    os << "J_re = " << matrix_list(cfg.model.hopping.real()) << "\n";
    os << "J_im = " << matrix_list(cfg.model.hopping.imag()) << "\n";
    os << "Delta_re = " << matrix_list(cfg.model.pairing.real()) << "\n";
    os << "Delta_im = " << matrix_list(cfg.model.pairing.imag()) << "\n";
    std::string sites;
    for (int s : cfg.model.coupled_sites) {
        if (!sites.empty()) sites += ",";
        sites += std::to_string(s + 1);
    }
    os << "coupled_sites = " << sites << "\n";
    os << "initial_state = "
       << (cfg.initial_state == StateSpec::Vacuum
               ? "vacuum"
               : cfg.initial_state == StateSpec::FullyOccupied ? "occupied"
                                                               : "bell-pair")
       << "\n";
    os << "\n[bath]\n";
    os << "gamma = " << fmt(cfg.bath.gamma) << "\n";
    os << "lambda = " << fmt(cfg.bath.lambda) << "\n";
    os << "oracle_modes = " << cfg.oracle_modes << "\n";
    os << "oracle_window_factor = " << fmt(cfg.oracle_window_factor) << "\n";
    os << "quality_tol = " << fmt(cfg.bath_quality_tol) << "\n";
    os << "\n[grid]\n";
    os << "t_max = " << fmt(cfg.grid.t_max) << "\n";
    os << "n_steps = " << cfg.grid.n_steps << "\n";
    os << "\n[solver]\n";
    os << "dyson_tol = " << fmt(cfg.dyson_tol) << "\n";
    os << "max_order = " << cfg.max_order << "\n";
    os << "theta_ordered = " << fmt(cfg.conventions.theta_zero_ordered) << "\n";
    os << "theta_self_energy = " << fmt(cfg.conventions.theta_zero_self_energy) << "\n";
    os << "project_each_step = " << (cfg.integration.project_each_step ? "true" : "false")
       << "\n";
    os << "physicality_tol = " << fmt(cfg.integration.physicality_tol) << "\n";
    os << "refine_midpoints = " << (cfg.refine_midpoints ? "true" : "false") << "\n";
    os << "check_residual = " << (cfg.check_residual ? "true" : "false") << "\n";
    os << "\n[run]\n";
    std::string modes;
    for (const auto& m : cfg.modes) {
        if (!modes.empty()) modes += ",";
        modes += m;
    }
    os << "modes = " << modes << "\n";
    if (!cfg.output_dir.empty()) os << "output = " << cfg.output_dir << "\n";
    os << "sweep = " << (cfg.sweep_axis.empty() ? "none" : cfg.sweep_axis) << "\n";
    if (!cfg.sweep_values.empty()) {
        std::string vals;
        for (double v : cfg.sweep_values) {
            if (!vals.empty()) vals += ",";
            vals += fmt(v);
        }
        os << "sweep_values = " << vals << "\n";
    }
    os << "sweep_jobs = " << cfg.sweep_jobs << "\n";
    os << "compare_max_tol = " << fmt(cfg.compare_max_tol) << "\n";
    os << "compare_rms_tol = " << fmt(cfg.compare_rms_tol) << "\n";
    os << "dump_kernels = " << (cfg.dump_kernels ? "true" : "false") << "\n";
}

std::string default_output_root() {
    const char* env = std::getenv("GME_OUTPUT_ROOT");
    return env && *env ? std::string(env) : std::string("gme_out");
}

}  // namespace gme
