#include "tomo/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tomo/parallel.hpp"
#include "tomo/rng.hpp"

namespace tomo {

namespace {

double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double vec_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

void check_eps_grid(const std::vector<double>& eps_grid) {
    if (eps_grid.empty())
        throw std::invalid_argument("eps_grid must not be empty");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0) || !std::isfinite(eps_grid[i]))
            throw std::invalid_argument("eps_grid values must be positive and finite");
        if (i > 0 && eps_grid[i] < eps_grid[i - 1])
            throw std::invalid_argument("eps_grid must be sorted ascending");
    }
}

// Epsilon grid for one noisy dataset: explicit grid if configured, otherwise
// log-spaced around the realized noise norm.
std::vector<double> grid_for_dataset(const std::vector<double>& configured,
                                     int n_points, const Sinogram& b_noisy,
                                     const Sinogram& b_clean) {
    if (!configured.empty()) return configured;
    double scale = diff_norm(b_noisy.values, b_clean.values);
    if (scale == 0.0) scale = 1e-9 * std::max(1.0, vec_norm(b_clean.values));
    return make_eps_grid(scale, n_points);
}

int projections_for(double mu, int n_suff) {
    const long long np = std::llround(mu * static_cast<double>(n_suff));
    return static_cast<int>(std::max(1LL, np));
}

}  // namespace

std::vector<double> make_eps_grid(double resid_scale, int n_points,
                                  double lo_frac, double hi_frac) {
    if (!(resid_scale > 0.0) || !std::isfinite(resid_scale))
        throw std::invalid_argument("make_eps_grid: resid_scale must be positive and finite");
    if (n_points < 2)
        throw std::invalid_argument("make_eps_grid: need at least 2 points");
    if (!(lo_frac > 0.0) || !(hi_frac > lo_frac))
        throw std::invalid_argument("make_eps_grid: need 0 < lo_frac < hi_frac");
    std::vector<double> grid(n_points);
    const double ratio = hi_frac / lo_frac;
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        grid[i] = resid_scale * lo_frac * std::pow(ratio, t);
    }
    return grid;
}

std::vector<PhaseDiagramCell> run_phase_diagram(const PhaseDiagramConfig& cfg) {
    if (cfg.grid_size < 2)
        throw std::invalid_argument("run_phase_diagram: grid_size must be at least 2");
    if (cfg.n_det < 1)
        throw std::invalid_argument("run_phase_diagram: n_det must be positive");
    if (cfg.trials_per_cell < 1)
        throw std::invalid_argument("run_phase_diagram: trials_per_cell must be positive");
    if (cfg.k_values.empty() || cfg.mu_values.empty())
        throw std::invalid_argument("run_phase_diagram: k_values and mu_values must be non-empty");
    for (double k : cfg.k_values)
        if (!(k > 0.0) || k > 1.0)
            throw std::invalid_argument("run_phase_diagram: k values must lie in (0, 1]");
    for (double mu : cfg.mu_values)
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::invalid_argument("run_phase_diagram: mu values must be positive");
    if (!(cfg.theta_max_deg > 0.0) || cfg.theta_max_deg > 90.0)
        throw std::invalid_argument("run_phase_diagram: theta_max must lie in (0, 90]");
    if (cfg.noise && !(cfg.noise->total_counts > 0.0))
        throw std::invalid_argument("run_phase_diagram: noise total_counts must be positive");

    const int n_suff =
        sufficient_projection_number(cfg.grid_size, cfg.grid_size, cfg.n_det);
    const std::size_t nk = cfg.k_values.size();
    const std::size_t nmu = cfg.mu_values.size();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials_per_cell);
    const std::size_t n_jobs = nk * nmu * trials;

    std::vector<std::uint8_t> recovered(n_jobs, 0);

    // One system matrix per distinct projection count, shared by every job
    // that needs it.
    std::map<int, std::vector<std::size_t>> jobs_by_np;
    for (std::size_t ik = 0; ik < nk; ++ik)
        for (std::size_t imu = 0; imu < nmu; ++imu) {
            const int np = projections_for(cfg.mu_values[imu], n_suff);
            for (std::size_t t = 0; t < trials; ++t)
                jobs_by_np[np].push_back((ik * nmu + imu) * trials + t);
        }

    for (const auto& [np, jobs] : jobs_by_np) {
        const ProjectionGeometry geom =
            make_geometry(cfg.grid_size, cfg.grid_size, cfg.n_det,
                          make_tilt_schedule(cfg.theta_max_deg, np));
        const SystemMatrix A = build_system_matrix(geom);

        parallel_for(jobs.size(), cfg.threads, [&](std::size_t ji) {
            const std::size_t job = jobs[ji];
            const std::size_t t = job % trials;
            const std::size_t cell = job / trials;
            const double k = cfg.k_values[cell / nmu];
            const double mu = cfg.mu_values[cell % nmu];
            try {
                PhantomSpec pspec;
                pspec.kind = PhantomKind::PixelSparse;
                pspec.width = cfg.grid_size;
                pspec.height = cfg.grid_size;
                pspec.k_target = k;
                pspec.seed = SeedChain(cfg.base_seed, "pd-phantom")
                                 .fold(k).fold(mu).fold(static_cast<std::uint64_t>(t))
                                 .seed();
                const ImageGrid x_true = generate_pixel_sparse(pspec);
                const Sinogram b_clean =
                    simulate_ideal_data(A, x_true, np, cfg.n_det);

                L1Options l1 = cfg.l1;
                l1.seed = SeedChain(cfg.base_seed, "pd-solver")
                              .fold(k).fold(mu).fold(static_cast<std::uint64_t>(t))
                              .seed();

                double best_rmse;
                if (cfg.noise) {
                    DoseSpec dose;
                    dose.total_counts = cfg.noise->total_counts;
                    dose.seed = SeedChain(cfg.base_seed, "pd-noise")
                                    .fold(k).fold(mu).fold(static_cast<std::uint64_t>(t))
                                    .seed();
                    const Sinogram b_noisy = apply_poisson_dose(b_clean, dose);
                    SolverChoice choice;
                    choice.kind = SolverKind::L1;
                    choice.l1 = l1;
                    const std::vector<double> grid = grid_for_dataset(
                        cfg.eps_grid, cfg.eps_points, b_noisy, b_clean);
                    const EpsSweepResult sweep =
                        run_epsilon_sweep(A, b_noisy, x_true, grid, choice, 1);
                    best_rmse = sweep.best.optimal_rmse;
                } else {
                    l1.epsilon = 0.0;
                    const ReconResult res =
                        solve_l1(A, b_clean, cfg.grid_size, cfg.grid_size, l1);
                    best_rmse = rmse(res.image, x_true);
                }
                if (best_rmse <= cfg.rule.rmse_threshold) recovered[job] = 1;
            } catch (const std::exception&) {
                // Failed trials count as non-recoveries; the sweep continues.
            }
        });
    }

    std::vector<PhaseDiagramCell> cells;
    cells.reserve(nk * nmu);
    for (std::size_t ik = 0; ik < nk; ++ik)
        for (std::size_t imu = 0; imu < nmu; ++imu) {
            PhaseDiagramCell cell;
            cell.k = cfg.k_values[ik];
            cell.mu = cfg.mu_values[imu];
            cell.n_trials = cfg.trials_per_cell;
            const std::size_t base = (ik * nmu + imu) * trials;
            for (std::size_t t = 0; t < trials; ++t)
                cell.n_recovered += recovered[base + t];
            cell.fraction =
                static_cast<double>(cell.n_recovered) / cell.n_trials;
            cells.push_back(cell);
        }
    return cells;
}

std::vector<std::pair<double, double>> extract_transition_boundary(
    const std::vector<PhaseDiagramCell>& cells, double level) {
    if (cells.empty())
        throw std::invalid_argument("extract_transition_boundary: no cells");
    if (!(level > 0.0) || level > 1.0)
        throw std::invalid_argument("extract_transition_boundary: level must lie in (0, 1]");

    std::vector<double> ks, mus;
    for (const auto& c : cells) {
        ks.push_back(c.k);
        mus.push_back(c.mu);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::sort(mus.begin(), mus.end());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());
    if (cells.size() != ks.size() * mus.size())
        throw std::invalid_argument(
            "extract_transition_boundary: cells do not form a complete (k, mu) grid");

    std::map<std::pair<double, double>, double> fraction;
    for (const auto& c : cells) {
        if (!fraction.emplace(std::make_pair(c.k, c.mu), c.fraction).second)
            throw std::invalid_argument(
                "extract_transition_boundary: duplicate (k, mu) cell");
    }

    std::vector<std::pair<double, double>> boundary;
    for (double k : ks)
        for (double mu : mus)
            if (fraction.at({k, mu}) >= level) {
                boundary.emplace_back(k, mu);
                break;
            }
    return boundary;
}

EpsSweepResult run_epsilon_sweep(const SystemMatrix& A, const Sinogram& b_noisy,
                                 const ImageGrid& x_true,
                                 const std::vector<double>& eps_grid,
                                 const SolverChoice& choice, int threads) {
    check_eps_grid(eps_grid);
    if (x_true.n_pixels() <= 0 ||
        static_cast<std::size_t>(x_true.n_pixels()) != static_cast<std::size_t>(A.n_cols))
        throw std::invalid_argument("run_epsilon_sweep: x_true does not match system matrix");
    if (b_noisy.values.size() != static_cast<std::size_t>(A.n_rows))
        throw std::invalid_argument("run_epsilon_sweep: sinogram does not match system matrix");

    const auto t0 = std::chrono::steady_clock::now();
    EpsSweepResult out;
    out.curve.resize(eps_grid.size());

    parallel_for(eps_grid.size(), threads, [&](std::size_t i) {
        ReconResult res;
        if (choice.kind == SolverKind::L1) {
            L1Options opts = choice.l1;
            opts.epsilon = eps_grid[i];
            res = solve_l1(A, b_noisy, x_true.width, x_true.height, opts);
        } else {
            TvOptions opts = choice.tv;
            opts.epsilon = eps_grid[i];
            res = solve_tv_asdpocs(A, b_noisy, x_true.width, x_true.height, opts);
        }
        out.curve[i].epsilon = eps_grid[i];
        out.curve[i].rmse = rmse(res.image, x_true);
        out.curve[i].converged = res.converged;
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < out.curve.size(); ++i) {
        if (std::isnan(out.curve[best].rmse) ||
            out.curve[i].rmse < out.curve[best].rmse)
            best = i;
    }
    const auto t1 = std::chrono::steady_clock::now();

    out.best.study = "eps-sweep";
    out.best.n_proj = b_noisy.n_proj;
    out.best.dose = b_noisy.dose.value_or(0.0);
    out.best.epsilon = out.curve[best].epsilon;
    out.best.optimal_epsilon = out.curve[best].epsilon;
    out.best.optimal_rmse = out.curve[best].rmse;
    out.best.converged = out.curve[best].converged;
    out.best.wall_time = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

namespace {

StudyRecord optimal_rmse_record(const StudyEngine& eng, const SystemMatrix& A,
                                double n_e, int n_p, double theta, int n_det) {
    const Sinogram b_clean = simulate_ideal_data(A, eng.phantom, n_p, n_det);
    DoseSpec dose;
    dose.total_counts = n_e;
    dose.seed = SeedChain(eng.base_seed, "noise")
                    .fold(n_e).fold(static_cast<std::uint64_t>(n_p)).fold(theta)
                    .seed();
    const Sinogram b_noisy = apply_poisson_dose(b_clean, dose);
    const std::vector<double> grid =
        grid_for_dataset(eng.eps_grid, eng.eps_points, b_noisy, b_clean);
    SolverChoice choice;
    choice.kind = SolverKind::TV;
    choice.tv = eng.tv;
    const EpsSweepResult sweep =
        run_epsilon_sweep(A, b_noisy, eng.phantom, grid, choice, eng.threads);
    StudyRecord rec = sweep.best;
    rec.n_proj = n_p;
    rec.dose = n_e;
    rec.theta_max_deg = theta;
    rec.seed = dose.seed;
    return rec;
}

void check_study_inputs(const StudyEngine& eng, const std::vector<int>& n_p_values) {
    eng.phantom.validate(true);
    if (n_p_values.empty())
        throw std::invalid_argument("study: n_p_values must be non-empty");
    for (int np : n_p_values)
        if (np < 1) throw std::invalid_argument("study: projection counts must be positive");
    if (!eng.eps_grid.empty()) check_eps_grid(eng.eps_grid);
}

}  // namespace

std::vector<StudyRecord> run_dose_study(const StudyEngine& eng,
                                        const std::vector<double>& n_e_values,
                                        const std::vector<int>& n_p_values,
                                        double theta_max_deg) {
    check_study_inputs(eng, n_p_values);
    if (n_e_values.empty())
        throw std::invalid_argument("run_dose_study: n_e_values must be non-empty");
    for (double ne : n_e_values)
        if (!(ne > 0.0)) throw std::invalid_argument("run_dose_study: N_e must be positive");
    if (!(theta_max_deg > 0.0) || theta_max_deg > 90.0)
        throw std::invalid_argument("run_dose_study: theta_max must lie in (0, 90]");

    const int n_det = eng.n_det > 0 ? eng.n_det : eng.phantom.width;
    std::vector<StudyRecord> records(n_e_values.size() * n_p_values.size());

    // Group by projection count so each system matrix is built once.
    for (std::size_t j = 0; j < n_p_values.size(); ++j) {
        const int np = n_p_values[j];
        const ProjectionGeometry geom =
            make_geometry(eng.phantom.width, eng.phantom.height, n_det,
                          make_tilt_schedule(theta_max_deg, np));
        const SystemMatrix A = build_system_matrix(geom);
        for (std::size_t i = 0; i < n_e_values.size(); ++i) {
            StudyRecord rec = optimal_rmse_record(eng, A, n_e_values[i], np,
                                                  theta_max_deg, n_det);
            rec.study = "dose-study";
            records[i * n_p_values.size() + j] = std::move(rec);
        }
    }
    return records;
}

std::vector<StudyRecord> run_wedge_study(const StudyEngine& eng, double n_e,
                                         const std::vector<double>& theta_values,
                                         const std::vector<int>& n_p_values) {
    check_study_inputs(eng, n_p_values);
    if (theta_values.empty())
        throw std::invalid_argument("run_wedge_study: theta_values must be non-empty");
    for (double th : theta_values)
        if (!(th > 0.0) || th > 90.0)
            throw std::invalid_argument("run_wedge_study: theta values must lie in (0, 90]");
    if (!(n_e > 0.0))
        throw std::invalid_argument("run_wedge_study: N_e must be positive");

    const int n_det = eng.n_det > 0 ? eng.n_det : eng.phantom.width;
    std::vector<StudyRecord> records;
    records.reserve(theta_values.size() * n_p_values.size());

    for (double theta : theta_values)
        for (int np : n_p_values) {
            const ProjectionGeometry geom =
                make_geometry(eng.phantom.width, eng.phantom.height, n_det,
                              make_tilt_schedule(theta, np));
            const SystemMatrix A = build_system_matrix(geom);
            StudyRecord rec = optimal_rmse_record(eng, A, n_e, np, theta, n_det);
            rec.study = "wedge-study";
            records.push_back(std::move(rec));
        }
    return records;
}

}  // namespace tomo
