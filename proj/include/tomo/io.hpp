#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomo/geometry.hpp"
#include "tomo/study.hpp"

namespace tomo {

// Flat key/value run configuration covering every subcommand. Defaults are
// the documented ones; a config file only needs the keys it wants to change.
struct RunConfig {
    std::string subcommand;  // phantom, project, reconstruct, phase-diagram,
                             // dose-study, wedge-study, eps-sweep
    std::uint64_t base_seed = 0;
    std::string out_dir = ".";
    int threads = 1;

    // geometry
    int grid_size = 32;
    int n_det = 0;  // 0 = grid_size
    double theta_max = 90.0;
    int n_proj = 0;  // 0 = sufficient projection number

    // phantom
    std::string phantom = "ptc-like";  // or "pixel-sparse"
    double k_target = 0.1;
    double carbon_level = 0.03;
    double particle_level = 0.75;

    // noise; 0 = ideal data
    double total_counts = 0.0;

    // solver
    std::string solver = "tv";  // or "l1"
    double epsilon = 0.0;
    bool nonneg = false;  // l1 sign constraint; the TV solver always clamps
    int max_iters = 0;  // 0 = solver default
    double tol_primal = 1e-6;
    double tol_dual = 1e-6;
    double beta0 = 1.0;
    double beta_red = 0.995;
    int n_tv_steps = 20;
    double alpha0 = 0.2;
    double alpha_red = 0.95;
    double r_max = 0.95;
    double delta = 1e-8;
    double c_alpha_stop = -0.95;
    double resid_band = 1e-4;

    // recovery rule
    double rmse_threshold = 0.05;

    // studies
    std::vector<double> k_values;
    std::vector<double> mu_values;
    int trials_per_cell = 10;
    std::vector<double> n_e_values;
    std::vector<int> n_p_values;
    std::vector<double> theta_values;
    std::vector<double> eps_grid;
    int eps_points = 12;
    double boundary_level = 0.5;

    // output
    double window_lo = 0.01;
    double window_hi = 0.05;
    bool pgm_binary = true;
    bool write_images = false;
    bool dump_matrix = false;

    bool operator==(const RunConfig&) const = default;
};

// Parses "key = value" lines; '#' starts a comment, lists are comma-separated.
// Unknown keys, duplicate keys, and unparsable values are rejected with
// messages naming the key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Inverse of parse_config: parse(serialize(cfg)) == cfg.
std::string serialize_config(const RunConfig& cfg);

// 16-bit portable graymap with linear windowing: v is mapped through
// clamp((v - lo) / (hi - lo)) * 65535 and rounded half-up. binary selects
// P5 (big-endian samples) over P2.
void write_image(const ImageGrid& x, std::ostream& os, double lo, double hi,
                 bool binary = true);
void write_image(const ImageGrid& x, const std::string& path, double lo,
                 double hi, bool binary = true);

// CSV emitters. Doubles are printed with 9 significant digits; identical
// inputs produce byte-identical files.
void write_study_csv(const std::vector<StudyRecord>& records, std::ostream& os);
void write_study_csv(const std::vector<StudyRecord>& records, const std::string& path);

void write_cells_csv(const std::vector<PhaseDiagramCell>& cells, std::ostream& os);
void write_cells_csv(const std::vector<PhaseDiagramCell>& cells, const std::string& path);

void write_boundary_csv(const std::vector<std::pair<double, double>>& boundary,
                        std::ostream& os);
void write_boundary_csv(const std::vector<std::pair<double, double>>& boundary,
                        const std::string& path);

void write_curve_csv(const std::vector<EpsSweepPoint>& curve, std::ostream& os);
void write_curve_csv(const std::vector<EpsSweepPoint>& curve, const std::string& path);

// Sinogram as a n_proj x n_det table, one projection per row.
void write_sinogram_csv(const Sinogram& b, std::ostream& os);
void write_sinogram_csv(const Sinogram& b, const std::string& path);

}  // namespace tomo
