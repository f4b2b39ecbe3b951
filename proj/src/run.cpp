#include "tomo/run.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "tomo/rng.hpp"

namespace tomo {

namespace {

int resolved_n_det(const RunConfig& cfg) {
    return cfg.n_det > 0 ? cfg.n_det : cfg.grid_size;
}

int resolved_n_proj(const RunConfig& cfg) {
    if (cfg.n_proj > 0) return cfg.n_proj;
    return sufficient_projection_number(cfg.grid_size, cfg.grid_size,
                                        resolved_n_det(cfg));
}

ImageGrid phantom_from_cfg(const RunConfig& cfg) {
    PhantomSpec spec;
    spec.kind = cfg.phantom == "pixel-sparse" ? PhantomKind::PixelSparse
                                              : PhantomKind::PtcLike;
    spec.width = cfg.grid_size;
    spec.height = cfg.grid_size;
    spec.k_target = cfg.k_target;
    spec.carbon_level = cfg.carbon_level;
    spec.particle_level = cfg.particle_level;
    spec.seed = derive_seed(cfg.base_seed, "phantom");
    return spec.kind == PhantomKind::PixelSparse ? generate_pixel_sparse(spec)
                                                 : generate_ptc_like(spec);
}

L1Options l1_from_cfg(const RunConfig& cfg) {
    L1Options o;
    o.epsilon = cfg.epsilon;
    o.nonneg = cfg.nonneg;
    if (cfg.max_iters > 0) o.max_iters = cfg.max_iters;
    o.tol_primal = cfg.tol_primal;
    o.tol_dual = cfg.tol_dual;
    o.seed = derive_seed(cfg.base_seed, "l1-start");
    return o;
}

TvOptions tv_from_cfg(const RunConfig& cfg) {
    TvOptions o;
    o.epsilon = cfg.epsilon;
    o.beta0 = cfg.beta0;
    o.beta_red = cfg.beta_red;
    o.n_tv_steps = cfg.n_tv_steps;
    o.alpha0 = cfg.alpha0;
    o.alpha_red = cfg.alpha_red;
    o.r_max = cfg.r_max;
    o.delta = cfg.delta;
    if (cfg.max_iters > 0) o.max_iters = cfg.max_iters;
    o.c_alpha_stop = cfg.c_alpha_stop;
    o.resid_band = cfg.resid_band;
    return o;
}

// Shared noise-seed rule: every Poisson draw is keyed by (N_e, N_p, theta).
std::uint64_t noise_seed_for(const RunConfig& cfg, double n_e, int n_p, double theta) {
    return SeedChain(cfg.base_seed, "noise")
        .fold(n_e).fold(static_cast<std::uint64_t>(n_p)).fold(theta)
        .seed();
}

StudyEngine engine_from_cfg(const RunConfig& cfg, ImageGrid phantom) {
    StudyEngine eng;
    eng.phantom = std::move(phantom);
    eng.n_det = cfg.n_det;  // 0 = phantom width, resolved by the studies
    eng.eps_grid = cfg.eps_grid;
    eng.eps_points = cfg.eps_points;
    eng.tv = tv_from_cfg(cfg);
    eng.base_seed = cfg.base_seed;
    eng.threads = cfg.threads;
    return eng;
}

void require_list(bool ok, const std::string& key, const std::string& sub) {
    if (!ok)
        throw std::invalid_argument("config: key \"" + key +
                                    "\" must be non-empty for " + sub);
}

struct Outputs {
    std::filesystem::path dir;
    std::ostream& log;
    std::vector<std::string> written;

    std::string path(const std::string& name) { return (dir / name).string(); }
    void note(const std::string& p) {
        written.push_back(p);
        log << "wrote " << p << '\n';
    }
};

void write_records(Outputs& out, const std::vector<StudyRecord>& records,
                   const std::string& name) {
    const std::string p = out.path(name);
    write_study_csv(records, p);
    out.note(p);
}

ReconResult solve_with(const RunConfig& cfg, const SystemMatrix& A,
                       const Sinogram& b, double epsilon) {
    if (cfg.solver == "l1") {
        L1Options o = l1_from_cfg(cfg);
        o.epsilon = epsilon;
        return solve_l1(A, b, cfg.grid_size, cfg.grid_size, o);
    }
    TvOptions o = tv_from_cfg(cfg);
    o.epsilon = epsilon;
    return solve_tv_asdpocs(A, b, cfg.grid_size, cfg.grid_size, o);
}

void run_phantom(const RunConfig& cfg, Outputs& out) {
    const ImageGrid x = phantom_from_cfg(cfg);
    const std::string p = out.path("phantom.pgm");
    write_image(x, p, cfg.window_lo, cfg.window_hi, cfg.pgm_binary);
    out.note(p);
}

void run_project(const RunConfig& cfg, Outputs& out) {
    const ImageGrid x = phantom_from_cfg(cfg);
    const int np = resolved_n_proj(cfg);
    const int nd = resolved_n_det(cfg);
    const ProjectionGeometry geom = make_geometry(
        cfg.grid_size, cfg.grid_size, nd, make_tilt_schedule(cfg.theta_max, np));
    const SystemMatrix A = build_system_matrix(geom);
    Sinogram b = simulate_ideal_data(A, x, np, nd);
    if (cfg.total_counts > 0.0) {
        DoseSpec dose{cfg.total_counts,
                      noise_seed_for(cfg, cfg.total_counts, np, cfg.theta_max)};
        b = apply_poisson_dose(b, dose);
    }
    const std::string p = out.path("sinogram.csv");
    write_sinogram_csv(b, p);
    out.note(p);
    if (cfg.dump_matrix) {
        const std::string mp = out.path("matrix.txt");
        std::ofstream os(mp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + mp);
        dump_triplets(A, os);
        out.note(mp);
    }
}

void run_reconstruct(const RunConfig& cfg, Outputs& out) {
    const ImageGrid x_true = phantom_from_cfg(cfg);
    const int np = resolved_n_proj(cfg);
    const int nd = resolved_n_det(cfg);
    const ProjectionGeometry geom = make_geometry(
        cfg.grid_size, cfg.grid_size, nd, make_tilt_schedule(cfg.theta_max, np));
    const SystemMatrix A = build_system_matrix(geom);
    Sinogram b = simulate_ideal_data(A, x_true, np, nd);
    std::uint64_t seed = cfg.base_seed;
    if (cfg.total_counts > 0.0) {
        seed = noise_seed_for(cfg, cfg.total_counts, np, cfg.theta_max);
        b = apply_poisson_dose(b, DoseSpec{cfg.total_counts, seed});
    }

    const ReconResult res = solve_with(cfg, A, b, cfg.epsilon);

    const std::string img = out.path("recon.pgm");
    write_image(res.image, img, cfg.window_lo, cfg.window_hi, cfg.pgm_binary);
    out.note(img);

    const std::string diag = out.path("diagnostics.csv");
    {
        std::ofstream os(diag, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + diag);
        write_diagnostics_csv(res, os);
    }
    out.note(diag);

    StudyRecord rec;
    rec.study = "reconstruct";
    rec.n_proj = np;
    rec.dose = cfg.total_counts;
    rec.theta_max_deg = cfg.theta_max;
    rec.epsilon = cfg.epsilon;
    rec.optimal_epsilon = cfg.epsilon;
    rec.optimal_rmse = rmse(res.image, x_true);
    rec.converged = res.converged;
    rec.seed = seed;
    write_records(out, {rec}, "summary.csv");
}

void run_phase_diagram_cmd(const RunConfig& cfg, Outputs& out) {
    require_list(!cfg.k_values.empty(), "k_values", "phase-diagram");
    require_list(!cfg.mu_values.empty(), "mu_values", "phase-diagram");

    PhaseDiagramConfig pd;
    pd.grid_size = cfg.grid_size;
    pd.n_det = resolved_n_det(cfg);
    pd.k_values = cfg.k_values;
    pd.mu_values = cfg.mu_values;
    pd.trials_per_cell = cfg.trials_per_cell;
    pd.rule.rmse_threshold = cfg.rmse_threshold;
    if (cfg.total_counts > 0.0) pd.noise = DoseSpec{cfg.total_counts, 0};
    pd.theta_max_deg = cfg.theta_max;
    pd.base_seed = cfg.base_seed;
    pd.l1 = l1_from_cfg(cfg);
    pd.eps_grid = cfg.eps_grid;
    pd.eps_points = cfg.eps_points;
    pd.threads = cfg.threads;

    const std::vector<PhaseDiagramCell> cells = run_phase_diagram(pd);
    const std::string cp = out.path("cells.csv");
    write_cells_csv(cells, cp);
    out.note(cp);

    const auto boundary = extract_transition_boundary(cells, cfg.boundary_level);
    const std::string bp = out.path("boundary.csv");
    write_boundary_csv(boundary, bp);
    out.note(bp);
}

void run_eps_sweep_cmd(const RunConfig& cfg, Outputs& out) {
    if (cfg.total_counts <= 0.0 && cfg.eps_grid.empty())
        throw std::invalid_argument(
            "config: key \"eps_grid\" is required when total_counts = 0");
    const ImageGrid x_true = phantom_from_cfg(cfg);
    const int np = resolved_n_proj(cfg);
    const int nd = resolved_n_det(cfg);
    const ProjectionGeometry geom = make_geometry(
        cfg.grid_size, cfg.grid_size, nd, make_tilt_schedule(cfg.theta_max, np));
    const SystemMatrix A = build_system_matrix(geom);
    const Sinogram b_clean = simulate_ideal_data(A, x_true, np, nd);

    Sinogram b = b_clean;
    std::uint64_t seed = cfg.base_seed;
    std::vector<double> grid = cfg.eps_grid;
    if (cfg.total_counts > 0.0) {
        seed = noise_seed_for(cfg, cfg.total_counts, np, cfg.theta_max);
        b = apply_poisson_dose(b_clean, DoseSpec{cfg.total_counts, seed});
        if (grid.empty()) {
            double scale = 0.0;
            for (std::size_t i = 0; i < b.values.size(); ++i) {
                const double d = b.values[i] - b_clean.values[i];
                scale += d * d;
            }
            grid = make_eps_grid(std::sqrt(scale), cfg.eps_points);
        }
    }

    SolverChoice choice;
    choice.kind = cfg.solver == "l1" ? SolverKind::L1 : SolverKind::TV;
    choice.l1 = l1_from_cfg(cfg);
    choice.tv = tv_from_cfg(cfg);

    EpsSweepResult sweep = run_epsilon_sweep(A, b, x_true, grid, choice, cfg.threads);
    sweep.best.theta_max_deg = cfg.theta_max;
    sweep.best.seed = seed;

    const std::string cp = out.path("curve.csv");
    write_curve_csv(sweep.curve, cp);
    out.note(cp);
    write_records(out, {sweep.best}, "best.csv");

    if (cfg.write_images) {
        const ReconResult res = solve_with(cfg, A, b, sweep.best.optimal_epsilon);
        const std::string ip = out.path("best.pgm");
        write_image(res.image, ip, cfg.window_lo, cfg.window_hi, cfg.pgm_binary);
        out.note(ip);
    }
}

void write_record_images(const RunConfig& cfg, Outputs& out,
                         const ImageGrid& phantom,
                         const std::vector<StudyRecord>& records) {
    const int nd = cfg.n_det > 0 ? cfg.n_det : phantom.width;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const StudyRecord& rec = records[i];
        const ProjectionGeometry geom =
            make_geometry(phantom.width, phantom.height, nd,
                          make_tilt_schedule(rec.theta_max_deg, rec.n_proj));
        const SystemMatrix A = build_system_matrix(geom);
        const Sinogram b_clean = simulate_ideal_data(A, phantom, rec.n_proj, nd);
        const Sinogram b = apply_poisson_dose(b_clean, DoseSpec{rec.dose, rec.seed});
        TvOptions o = tv_from_cfg(cfg);
        o.epsilon = rec.optimal_epsilon;
        const ReconResult res =
            solve_tv_asdpocs(A, b, phantom.width, phantom.height, o);
        const std::string p = out.path("recon_" + std::to_string(i) + ".pgm");
        write_image(res.image, p, cfg.window_lo, cfg.window_hi, cfg.pgm_binary);
        out.note(p);
    }
}

void run_dose_study_cmd(const RunConfig& cfg, Outputs& out) {
    require_list(!cfg.n_e_values.empty(), "n_e_values", "dose-study");
    require_list(!cfg.n_p_values.empty(), "n_p_values", "dose-study");
    const ImageGrid phantom = phantom_from_cfg(cfg);
    const StudyEngine eng = engine_from_cfg(cfg, phantom);
    const std::vector<StudyRecord> records =
        run_dose_study(eng, cfg.n_e_values, cfg.n_p_values, cfg.theta_max);
    write_records(out, records, "records.csv");
    if (cfg.write_images) write_record_images(cfg, out, phantom, records);
}

void run_wedge_study_cmd(const RunConfig& cfg, Outputs& out) {
    require_list(!cfg.theta_values.empty(), "theta_values", "wedge-study");
    require_list(!cfg.n_p_values.empty(), "n_p_values", "wedge-study");
    if (!(cfg.total_counts > 0.0))
        throw std::invalid_argument(
            "config: key \"total_counts\" must be positive for wedge-study");
    const ImageGrid phantom = phantom_from_cfg(cfg);
    const StudyEngine eng = engine_from_cfg(cfg, phantom);
    const std::vector<StudyRecord> records =
        run_wedge_study(eng, cfg.total_counts, cfg.theta_values, cfg.n_p_values);
    write_records(out, records, "records.csv");
    if (cfg.write_images) write_record_images(cfg, out, phantom, records);
}

}  // namespace

std::vector<std::string> run_subcommand(const RunConfig& cfg, std::ostream& log) {
    if (cfg.subcommand.empty())
        throw std::invalid_argument("config: subcommand must be set");
    if (cfg.threads < 1)
        throw std::invalid_argument("config: threads must be positive");

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + cfg.out_dir +
                                 ": " + ec.message());

    Outputs out{cfg.out_dir, log, {}};
    if (cfg.subcommand == "phantom") run_phantom(cfg, out);
    else if (cfg.subcommand == "project") run_project(cfg, out);
    else if (cfg.subcommand == "reconstruct") run_reconstruct(cfg, out);
    else if (cfg.subcommand == "phase-diagram") run_phase_diagram_cmd(cfg, out);
    else if (cfg.subcommand == "eps-sweep") run_eps_sweep_cmd(cfg, out);
    else if (cfg.subcommand == "dose-study") run_dose_study_cmd(cfg, out);
    else if (cfg.subcommand == "wedge-study") run_wedge_study_cmd(cfg, out);
    else
        throw std::invalid_argument("config: unknown subcommand \"" +
                                    cfg.subcommand + "\"");
    return out.written;
}

}  // namespace tomo
