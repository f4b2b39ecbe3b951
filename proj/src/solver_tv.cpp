#include "tomo/solver_tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tomo {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double diff_norm2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double residual_norm_at(const SystemMatrix& A, const std::vector<double>& x,
                        const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t r = 0; r < static_cast<std::size_t>(A.n_rows); ++r) {
        const auto cols = A.row_cols(r);
        const auto vals = A.row_vals(r);
        double dot = 0.0;
        for (std::size_t j = 0; j < cols.size(); ++j) dot += vals[j] * x[cols[j]];
        const double d = dot - b[r];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double tv_norm(const ImageGrid& x, double delta) {
    if (delta < 0.0) throw std::invalid_argument("tv_norm: delta must be nonnegative");
    const int W = x.width, H = x.height;
    const double d2 = delta * delta;
    double s = 0.0;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double v = x.at(r, c);
            const double dx = (c + 1 < W) ? x.at(r, c + 1) - v : 0.0;
            const double dy = (r + 1 < H) ? x.at(r + 1, c) - v : 0.0;
            s += std::sqrt(dx * dx + dy * dy + d2);
        }
    }
    return s;
}

std::vector<double> tv_gradient(const ImageGrid& x, double delta) {
    if (delta < 0.0) throw std::invalid_argument("tv_gradient: delta must be nonnegative");
    const int W = x.width, H = x.height;
    const double d2 = delta * delta;
    std::vector<double> g(x.values.size(), 0.0);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double v = x.at(r, c);
            const double dx = (c + 1 < W) ? x.at(r, c + 1) - v : 0.0;
            const double dy = (r + 1 < H) ? x.at(r + 1, c) - v : 0.0;
            const double t = std::sqrt(dx * dx + dy * dy + d2);
            if (t == 0.0) continue;
            const std::size_t j = static_cast<std::size_t>(r) * W + c;
            g[j] += (-dx - dy) / t;
            if (c + 1 < W) g[j + 1] += dx / t;
            if (r + 1 < H) g[j + W] += dy / t;
        }
    }
    return g;
}

double cosine_alpha(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("cosine_alpha: vector lengths differ");
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

ReconResult solve_tv_asdpocs(const SystemMatrix& A, const Sinogram& b,
                             int grid_width, int grid_height,
                             const TvOptions& opts) {
    const std::size_t n = static_cast<std::size_t>(grid_width) * grid_height;
    if (static_cast<std::size_t>(A.n_cols) != n)
        throw std::invalid_argument("solve_tv_asdpocs: grid size does not match system matrix columns");
    if (b.values.size() != static_cast<std::size_t>(A.n_rows))
        throw std::invalid_argument("solve_tv_asdpocs: sinogram size does not match system matrix rows");
    if (opts.epsilon < 0.0)
        throw std::invalid_argument("solve_tv_asdpocs: epsilon must be nonnegative");
    if (opts.max_iters < 1)
        throw std::invalid_argument("solve_tv_asdpocs: max_iters must be positive");
    if (opts.n_tv_steps < 0)
        throw std::invalid_argument("solve_tv_asdpocs: n_tv_steps must be nonnegative");

    const std::vector<double> row_nrm = A.row_norms_sq();
    const std::size_t m = A.n_rows;

    std::vector<double> x(n, 0.0), x_start(n, 0.0), x_pocs(n, 0.0);
    double beta = opts.beta0;
    // TV step length: set from the first data step, then ratcheted down
    // whenever the TV move outpaces the data move while the residual is
    // still above epsilon. Keeping it otherwise fixed is what pins the
    // residual to the epsilon ball instead of letting it drift inside.
    double dtvg = 0.0;
    bool dtvg_set = false;

    ReconResult out;
    out.image.width = grid_width;
    out.image.height = grid_height;
    out.converged = false;

    ImageGrid view;
    view.width = grid_width;
    view.height = grid_height;

    int k = 0;
    for (; k < opts.max_iters; ++k) {
        x_start = x;

        // Relaxed Kaczmarz sweep over rays in index order.
        for (std::size_t r = 0; r < m; ++r) {
            if (row_nrm[r] == 0.0) continue;
            const auto cols = A.row_cols(r);
            const auto vals = A.row_vals(r);
            double dot = 0.0;
            for (std::size_t j = 0; j < cols.size(); ++j) dot += vals[j] * x[cols[j]];
            const double corr = beta * (b.values[r] - dot) / row_nrm[r];
            for (std::size_t j = 0; j < cols.size(); ++j) x[cols[j]] += corr * vals[j];
        }
        if (opts.nonneg)
            for (double& v : x) v = std::max(0.0, v);
        x_pocs = x;

        const double d_data = diff_norm2(x_pocs, x_start);
        const double E = residual_norm_at(A, x_pocs, b.values);
        if (!dtvg_set && d_data > 0.0) {
            dtvg = opts.alpha0 * d_data;
            dtvg_set = true;
        }

        if (dtvg > 0.0) {
            double tv_prev = 0.0;
            if (opts.check_tv_monotone) {
                view.values = x;
                tv_prev = tv_norm(view, opts.delta);
            }
            for (int j = 0; j < opts.n_tv_steps; ++j) {
                view.values = x;
                const std::vector<double> g = tv_gradient(view, opts.delta);
                const double gn = norm2(g);
                if (gn == 0.0) break;
                const double scale = dtvg / gn;
                for (std::size_t i = 0; i < n; ++i) x[i] -= scale * g[i];
                if (opts.check_tv_monotone) {
                    view.values = x;
                    const double tv_cur = tv_norm(view, opts.delta);
                    if (tv_cur > tv_prev) ++out.tv_monotone_violations;
                    tv_prev = tv_cur;
                }
            }
        }
        const double d_tv = diff_norm2(x, x_pocs);

        std::vector<double> step_data(n), step_tv(n);
        for (std::size_t i = 0; i < n; ++i) {
            step_data[i] = x_pocs[i] - x_start[i];
            step_tv[i] = x[i] - x_pocs[i];
        }
        const double c_alpha = cosine_alpha(step_data, step_tv);

        view.values = x;
        IterationLog log;
        log.residual = E;
        log.objective = tv_norm(view, 0.0);
        log.c_alpha = c_alpha;
        log.beta = beta;
        log.alpha = dtvg;
        out.diagnostics.push_back(log);

        const bool on_ball = opts.epsilon > 0.0
                                 ? std::abs(E - opts.epsilon) / opts.epsilon <= opts.resid_band
                                 : E <= opts.eps_zero_abs;
        if (c_alpha <= opts.c_alpha_stop && on_ball) {
            out.converged = true;
            ++k;
            break;
        }

        // Exact fixed point (e.g. all-zero data): nothing will ever move again.
        if (d_data == 0.0 && d_tv == 0.0) {
            ++k;
            break;
        }

        if (d_tv > opts.r_max * d_data && E > opts.epsilon) dtvg *= opts.alpha_red;
        beta *= opts.beta_red;
    }

    out.image.values = x;
    out.iterations = k;
    out.residual_norm = residual_norm_at(A, x, b.values);
    view.values = x;
    out.objective = tv_norm(view, 0.0);
    return out;
}

}  // namespace tomo
