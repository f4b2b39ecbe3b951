#include "tomo/solver_l1.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tomo {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

}  // namespace

ReconResult solve_l1(const SystemMatrix& A, const Sinogram& b,
                     int grid_width, int grid_height, const L1Options& opts) {
    const std::size_t n = static_cast<std::size_t>(grid_width) * grid_height;
    if (static_cast<std::size_t>(A.n_cols) != n)
        throw std::invalid_argument("solve_l1: grid size does not match system matrix columns");
    if (b.values.size() != static_cast<std::size_t>(A.n_rows))
        throw std::invalid_argument("solve_l1: sinogram size does not match system matrix rows");
    if (opts.epsilon < 0.0)
        throw std::invalid_argument("solve_l1: epsilon must be nonnegative");
    if (opts.max_iters < 1)
        throw std::invalid_argument("solve_l1: max_iters must be positive");

    ReconResult out;
    out.image.width = grid_width;
    out.image.height = grid_height;
    out.image.values.assign(n, 0.0);

    const double b_norm = norm2(b.values);

    // Zero is optimal whenever it is feasible.
    if (b_norm <= opts.epsilon) {
        out.iterations = 0;
        out.residual_norm = b_norm;
        out.objective = 0.0;
        out.converged = true;
        return out;
    }

    const double L = estimate_operator_norm(A, 50, opts.seed);
    if (L == 0.0) {
        // A maps everything to zero and b is outside the tolerance ball.
        out.iterations = 0;
        out.residual_norm = b_norm;
        out.objective = 0.0;
        out.converged = false;
        return out;
    }

    const double step = 1.0 / (1.01 * L);  // tau = sigma, tau*sigma*|A|^2 < 1
    const double tau = step;
    const double sigma = step;

    const std::size_t m = A.n_rows;
    std::vector<double> x(n, 0.0), x_prev(n, 0.0);
    std::vector<double> p(m, 0.0);       // dual variable
    std::vector<double> y(m, 0.0);       // A x, maintained incrementally
    std::vector<double> y_prev(m, 0.0);  // A x_prev
    std::vector<double> u(m, 0.0);
    std::vector<double> grad(n, 0.0);    // A^T p

    const double feas_scale = std::max(1.0, b_norm);
    out.converged = false;

    int k = 0;
    for (; k < opts.max_iters; ++k) {
        // Dual ascent on the extrapolated iterate: A(2x - x_prev) = 2y - y_prev.
        double u_norm_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            u[i] = p[i] + sigma * (2.0 * y[i] - y_prev[i] - b.values[i]);
            u_norm_sq += u[i] * u[i];
        }
        const double u_norm = std::sqrt(u_norm_sq);
        double shrink = 1.0;
        if (opts.epsilon > 0.0)
            shrink = u_norm > 0.0 ? std::max(0.0, 1.0 - sigma * opts.epsilon / u_norm) : 0.0;
        for (std::size_t i = 0; i < m; ++i) p[i] = shrink * u[i];

        // Primal descent with soft thresholding.
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const double pr = p[r];
            if (pr == 0.0) continue;
            const auto cols = A.row_cols(r);
            const auto vals = A.row_vals(r);
            for (std::size_t j = 0; j < cols.size(); ++j)
                grad[cols[j]] += vals[j] * pr;
        }
        x_prev.swap(x);
        double dx_norm_sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = x_prev[j] - tau * grad[j];
            double xj;
            if (opts.nonneg) {
                xj = std::max(0.0, v - tau);
            } else {
                xj = v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
            }
            x[j] = xj;
            const double d = xj - x_prev[j];
            dx_norm_sq += d * d;
        }

        y_prev.swap(y);
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const auto cols = A.row_cols(r);
            const auto vals = A.row_vals(r);
            double s = 0.0;
            for (std::size_t j = 0; j < cols.size(); ++j) s += vals[j] * x[cols[j]];
            y[r] = s;
        }

        double resid_sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = y[i] - b.values[i];
            resid_sq += d * d;
        }
        const double resid = std::sqrt(resid_sq);
        const double obj = norm1(x);

        IterationLog log;
        log.residual = resid;
        log.objective = obj;
        out.diagnostics.push_back(log);

        const double x_scale = std::max(1.0, norm2(x));
        const double feas_viol = std::max(0.0, resid - opts.epsilon) / feas_scale;
        const double stall = std::sqrt(dx_norm_sq) / x_scale;
        if (feas_viol <= opts.tol_primal && stall <= opts.tol_dual) {
            out.converged = true;
            ++k;
            break;
        }
    }

    out.image.values = x;
    out.iterations = k;
    if (!out.diagnostics.empty()) {
        out.residual_norm = out.diagnostics.back().residual;
        out.objective = out.diagnostics.back().objective;
    }
    return out;
}

}  // namespace tomo
