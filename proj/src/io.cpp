#include "tomo/io.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tomo {

namespace {

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config: invalid value \"" + value +
                                "\" for key \"" + key + "\"");
}

void parse_value(const std::string& v, const std::string& key, double& out) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
        bad_value(key, v);
    out = d;
}

void parse_value(const std::string& v, const std::string& key, int& out) {
    errno = 0;
    char* end = nullptr;
    const long l = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE ||
        l < INT_MIN || l > INT_MAX)
        bad_value(key, v);
    out = static_cast<int>(l);
}

void parse_value(const std::string& v, const std::string& key, std::uint64_t& out) {
    if (v.empty() || v[0] == '-') bad_value(key, v);
    errno = 0;
    char* end = nullptr;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v);
    out = u;
}

void parse_value(const std::string& v, const std::string& key, bool& out) {
    if (v == "true" || v == "1") out = true;
    else if (v == "false" || v == "0") out = false;
    else bad_value(key, v);
}

void parse_value(const std::string& v, const std::string&, std::string& out) {
    out = v;
}

template <class T>
void parse_value(const std::string& v, const std::string& key, std::vector<T>& out) {
    out.clear();
    if (trim(v).empty()) return;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = v.find(',', pos);
        const std::string item = trim(v.substr(pos, comma - pos));
        T value;
        parse_value(item, key, value);
        out.push_back(value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
}

std::string emit_value(double v) { return g17(v); }
std::string emit_value(int v) { return std::to_string(v); }
std::string emit_value(std::uint64_t v) { return std::to_string(v); }
std::string emit_value(bool v) { return v ? "true" : "false"; }
std::string emit_value(const std::string& v) { return v; }

template <class T>
std::string emit_value(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += emit_value(v[i]);
    }
    return s;
}

// One row per config key: key name in the file <-> RunConfig field.
#define TOMO_CONFIG_KEYS(X)                 \
    X(subcommand, subcommand)               \
    X(base_seed, base_seed)                 \
    X(out, out_dir)                         \
    X(threads, threads)                     \
    X(grid_size, grid_size)                 \
    X(n_det, n_det)                         \
    X(theta_max, theta_max)                 \
    X(n_proj, n_proj)                       \
    X(phantom, phantom)                     \
    X(k_target, k_target)                   \
    X(carbon_level, carbon_level)           \
    X(particle_level, particle_level)       \
    X(total_counts, total_counts)           \
    X(solver, solver)                       \
    X(epsilon, epsilon)                     \
    X(nonneg, nonneg)                       \
    X(max_iters, max_iters)                 \
    X(tol_primal, tol_primal)               \
    X(tol_dual, tol_dual)                   \
    X(beta0, beta0)                         \
    X(beta_red, beta_red)                   \
    X(n_tv_steps, n_tv_steps)               \
    X(alpha0, alpha0)                       \
    X(alpha_red, alpha_red)                 \
    X(r_max, r_max)                         \
    X(delta, delta)                         \
    X(c_alpha_stop, c_alpha_stop)           \
    X(resid_band, resid_band)               \
    X(rmse_threshold, rmse_threshold)       \
    X(k_values, k_values)                   \
    X(mu_values, mu_values)                 \
    X(trials_per_cell, trials_per_cell)     \
    X(n_e_values, n_e_values)               \
    X(n_p_values, n_p_values)               \
    X(theta_values, theta_values)           \
    X(eps_grid, eps_grid)                   \
    X(eps_points, eps_points)               \
    X(boundary_level, boundary_level)       \
    X(window_lo, window_lo)                 \
    X(window_hi, window_hi)                 \
    X(pgm_binary, pgm_binary)               \
    X(write_images, write_images)           \
    X(dump_matrix, dump_matrix)

void check_choice(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (value == a) return;
    bad_value(key, value);
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

void finish(std::ostream& os, const std::string& path) {
    os.flush();
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected \"key = value\", got \"" +
                                        trim(line) + "\"");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: missing key before '='");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key \"" + key + "\"");

#define TOMO_APPLY_KEY(KEY, FIELD) \
        if (key == #KEY) { parse_value(value, key, cfg.FIELD); } else
        TOMO_CONFIG_KEYS(TOMO_APPLY_KEY)
        throw std::invalid_argument("config: unknown key \"" + key + "\"");
#undef TOMO_APPLY_KEY
    }

    if (!cfg.subcommand.empty())
        check_choice("subcommand", cfg.subcommand,
                     {"phantom", "project", "reconstruct", "phase-diagram",
                      "dose-study", "wedge-study", "eps-sweep"});
    check_choice("solver", cfg.solver, {"l1", "tv"});
    check_choice("phantom", cfg.phantom, {"pixel-sparse", "ptc-like"});
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config file " + path);
    std::ostringstream text;
    text << is.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
#define TOMO_EMIT_KEY(KEY, FIELD) \
    out += #KEY; out += " = "; out += emit_value(cfg.FIELD); out += '\n';
    TOMO_CONFIG_KEYS(TOMO_EMIT_KEY)
#undef TOMO_EMIT_KEY
    return out;
}

void write_image(const ImageGrid& x, std::ostream& os, double lo, double hi,
                 bool binary) {
    x.validate();
    if (!(lo < hi))
        throw std::invalid_argument("write_image: window lo must be below hi");
    os << (binary ? "P5" : "P2") << '\n'
       << x.width << ' ' << x.height << '\n'
       << "65535\n";
    const double span = hi - lo;
    for (int r = 0; r < x.height; ++r) {
        for (int c = 0; c < x.width; ++c) {
            double t = (x.at(r, c) - lo) / span;
            if (!(t > 0.0)) t = 0.0;
            if (t > 1.0) t = 1.0;
            const unsigned u = static_cast<unsigned>(t * 65535.0 + 0.5);
            if (binary) {
                os.put(static_cast<char>(u >> 8));
                os.put(static_cast<char>(u & 0xff));
            } else {
                os << u << (c + 1 < x.width ? ' ' : '\n');
            }
        }
    }
}

void write_image(const ImageGrid& x, const std::string& path, double lo,
                 double hi, bool binary) {
    std::ofstream os = open_out(path, binary);
    write_image(x, os, lo, hi, binary);
    finish(os, path);
}

void write_study_csv(const std::vector<StudyRecord>& records, std::ostream& os) {
    os << "study,n_proj,dose,theta_max,epsilon,optimal_epsilon,optimal_rmse,"
          "converged,seed\n";
    for (const StudyRecord& r : records) {
        os << r.study << ',' << r.n_proj << ',' << g9(r.dose) << ','
           << g9(r.theta_max_deg) << ',' << g9(r.epsilon) << ','
           << g9(r.optimal_epsilon) << ',' << g9(r.optimal_rmse) << ','
           << (r.converged ? 1 : 0) << ',' << r.seed << '\n';
    }
}

void write_study_csv(const std::vector<StudyRecord>& records, const std::string& path) {
    std::ofstream os = open_out(path, true);
    write_study_csv(records, os);
    finish(os, path);
}

void write_cells_csv(const std::vector<PhaseDiagramCell>& cells, std::ostream& os) {
    os << "k,mu,n_trials,n_recovered,fraction\n";
    for (const PhaseDiagramCell& c : cells) {
        os << g9(c.k) << ',' << g9(c.mu) << ',' << c.n_trials << ','
           << c.n_recovered << ',' << g9(c.fraction) << '\n';
    }
}

void write_cells_csv(const std::vector<PhaseDiagramCell>& cells, const std::string& path) {
    std::ofstream os = open_out(path, true);
    write_cells_csv(cells, os);
    finish(os, path);
}

void write_boundary_csv(const std::vector<std::pair<double, double>>& boundary,
                        std::ostream& os) {
    os << "k,mu\n";
    for (const auto& [k, mu] : boundary)
        os << g9(k) << ',' << g9(mu) << '\n';
}

void write_boundary_csv(const std::vector<std::pair<double, double>>& boundary,
                        const std::string& path) {
    std::ofstream os = open_out(path, true);
    write_boundary_csv(boundary, os);
    finish(os, path);
}

void write_curve_csv(const std::vector<EpsSweepPoint>& curve, std::ostream& os) {
    os << "epsilon,rmse,converged\n";
    for (const EpsSweepPoint& p : curve)
        os << g9(p.epsilon) << ',' << g9(p.rmse) << ',' << (p.converged ? 1 : 0)
           << '\n';
}

void write_curve_csv(const std::vector<EpsSweepPoint>& curve, const std::string& path) {
    std::ofstream os = open_out(path, true);
    write_curve_csv(curve, os);
    finish(os, path);
}

void write_sinogram_csv(const Sinogram& b, std::ostream& os) {
    b.validate();
    for (int p = 0; p < b.n_proj; ++p) {
        for (int d = 0; d < b.n_det; ++d) {
            os << g9(b.values[static_cast<std::size_t>(p) * b.n_det + d]);
            os << (d + 1 < b.n_det ? ',' : '\n');
        }
    }
}

void write_sinogram_csv(const Sinogram& b, const std::string& path) {
    std::ofstream os = open_out(path, true);
    write_sinogram_csv(b, os);
    finish(os, path);
}

}  // namespace tomo
