#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tomo/geometry.hpp"
#include "tomo/metrics.hpp"
#include "tomo/noise.hpp"
#include "tomo/phantom.hpp"
#include "tomo/projector.hpp"
#include "tomo/solver_l1.hpp"
#include "tomo/solver_tv.hpp"

namespace tomo {

enum class SolverKind { L1, TV };

// Which solver an epsilon sweep runs, with its full option set.
struct SolverChoice {
    SolverKind kind = SolverKind::TV;
    L1Options l1;
    TvOptions tv;
};

struct PhaseDiagramConfig {
    int grid_size = 32;  // square images
    int n_det = 32;
    std::vector<double> k_values;   // in (0, 1]
    std::vector<double> mu_values;  // in (0, inf)
    int trials_per_cell = 10;
    RecoveryRule rule;
    std::optional<DoseSpec> noise;  // absent = ideal data; seed field ignored
    double theta_max_deg = 90.0;
    std::uint64_t base_seed = 0;
    L1Options l1;                  // epsilon is set per protocol, not from here
    std::vector<double> eps_grid;  // noisy cells; empty = auto per dataset
    int eps_points = 12;
    int threads = 1;
};

struct PhaseDiagramCell {
    double k = 0.0;
    double mu = 0.0;
    int n_trials = 0;
    int n_recovered = 0;
    double fraction = 0.0;
};

// One optimal-RMSE measurement: dataset parameters, the epsilon achieving the
// smallest RMSE over the sweep, and that RMSE. wall_time is informational and
// never serialized (outputs must be byte-identical across reruns).
struct StudyRecord {
    std::string study;
    int n_proj = 0;
    double dose = 0.0;  // total counts N_e; 0 for ideal data
    double theta_max_deg = 90.0;
    double epsilon = 0.0;  // epsilon the reported reconstruction used
    double optimal_epsilon = 0.0;
    double optimal_rmse = 0.0;
    bool converged = false;
    std::uint64_t seed = 0;
    double wall_time = 0.0;  // seconds
};

struct EpsSweepPoint {
    double epsilon = 0.0;
    double rmse = 0.0;
    bool converged = false;
};

struct EpsSweepResult {
    std::vector<EpsSweepPoint> curve;
    StudyRecord best;
};

// Shared setup for the optimal-RMSE studies (dose and missing wedge).
struct StudyEngine {
    ImageGrid phantom;
    int n_det = 0;  // 0 = phantom width
    std::vector<double> eps_grid;  // empty = auto grid per dataset
    int eps_points = 12;
    TvOptions tv;
    std::uint64_t base_seed = 0;
    int threads = 1;
};

// Logarithmic epsilon grid spanning [lo_frac, hi_frac] x resid_scale.
std::vector<double> make_eps_grid(double resid_scale, int n_points = 12,
                                  double lo_frac = 1e-3, double hi_frac = 3.0);

// Recovery fraction over the (k, mu) grid. Cells are computed independently
// (mu maps to N_p = round(mu * N_suff)); any per-trial failure counts as a
// non-recovery. Cell order follows the input k (outer) and mu (inner) lists.
std::vector<PhaseDiagramCell> run_phase_diagram(const PhaseDiagramConfig& cfg);

// For each k, the smallest mu whose recovery fraction reaches `level`.
// Requires a complete rectangular cell grid; k without a qualifying mu is
// omitted. Output sorted by k.
std::vector<std::pair<double, double>> extract_transition_boundary(
    const std::vector<PhaseDiagramCell>& cells, double level = 0.5);

// One reconstruction per epsilon; returns the full (epsilon, rmse) curve and
// the arg-min record. Unconverged solves keep their final RMSE and are
// flagged. eps_grid must be positive and ascending.
EpsSweepResult run_epsilon_sweep(const SystemMatrix& A, const Sinogram& b_noisy,
                                 const ImageGrid& x_true,
                                 const std::vector<double>& eps_grid,
                                 const SolverChoice& choice, int threads = 1);

// Optimal RMSE over a (N_e, N_p) grid at fixed tilt range: Poisson data per
// cell, TV epsilon sweep, one record per cell in (N_e outer, N_p inner) order.
std::vector<StudyRecord> run_dose_study(const StudyEngine& eng,
                                        const std::vector<double>& n_e_values,
                                        const std::vector<int>& n_p_values,
                                        double theta_max_deg = 90.0);

// Same protocol over a (theta, N_p) grid at fixed total counts. Noise seeds
// derive from (N_e, N_p, theta), so the theta = 90 row of a wedge study
// matches the corresponding dose-study row exactly.
std::vector<StudyRecord> run_wedge_study(const StudyEngine& eng, double n_e,
                                         const std::vector<double>& theta_values,
                                         const std::vector<int>& n_p_values);

}  // namespace tomo
