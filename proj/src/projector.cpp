#include "tomo/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tomo/rng.hpp"

namespace tomo {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// One ray in grid coordinates shifted so the image occupies [0,W]x[0,H].
struct Ray {
    double u0, v0;  // a point on the ray
    double du, dv;  // unit direction
};

Ray ray_for(const ProjectionGeometry& g, int proj, int det) {
    const double phi = g.schedule.angles_deg[proj] * kPi / 180.0;
    const double s = std::sin(phi), c = std::cos(phi);
    // Detector axis (c, s) is the rotated horizontal; rays run along (-s, c),
    // perpendicular to it. Bin offsets are centered on the grid center.
    const double t_off = (det - 0.5 * (g.n_det - 1)) * g.det_spacing;
    Ray r;
    r.u0 = t_off * c + 0.5 * g.grid_width;
    r.v0 = t_off * s + 0.5 * g.grid_height;
    r.du = -s;
    r.dv = c;
    return r;
}

// Siddon-style incremental march. Appends (pixel, length) pairs for one ray.
// Pixel membership is decided at segment midpoints, so corner-grazing
// contacts contribute nothing (open-boundary convention).
void trace_ray(const Ray& r, int W, int H,
               std::vector<std::uint32_t>& cols, std::vector<double>& vals) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();

    const double dir[2] = {r.du, r.dv};
    const double org[2] = {r.u0, r.v0};
    const double hi[2] = {static_cast<double>(W), static_cast<double>(H)};

    for (int a = 0; a < 2; ++a) {
        if (std::abs(dir[a]) < 1e-14) {
            if (org[a] <= 0.0 || org[a] >= hi[a]) return;  // parallel and outside
        } else {
            const double t1 = (0.0 - org[a]) / dir[a];
            const double t2 = (hi[a] - org[a]) / dir[a];
            tmin = std::max(tmin, std::min(t1, t2));
            tmax = std::min(tmax, std::max(t1, t2));
        }
    }
    if (!(tmax > tmin)) return;

    const double inv_du = std::abs(r.du) > 1e-14 ? 1.0 / std::abs(r.du) : 0.0;
    const double inv_dv = std::abs(r.dv) > 1e-14 ? 1.0 / std::abs(r.dv) : 0.0;

    // Next boundary-crossing parameter along each axis.
    auto first_crossing = [&](double o, double d, double t0) {
        if (std::abs(d) < 1e-14) return std::numeric_limits<double>::infinity();
        const double p = o + t0 * d;
        const double boundary = d > 0 ? std::floor(p) + 1.0 : std::ceil(p) - 1.0;
        return t0 + (boundary - p) / d;
    };
    double tx = first_crossing(r.u0, r.du, tmin);
    double ty = first_crossing(r.v0, r.dv, tmin);

    double t = tmin;
    const int max_steps = W + H + 4;
    const std::size_t row_begin = cols.size();
    for (int step = 0; step < max_steps && t < tmax - 1e-13; ++step) {
        double tn = std::min({tx, ty, tmax});
        if (tn > t) {
            const double tm = 0.5 * (t + tn);
            int cx = static_cast<int>(std::floor(r.u0 + tm * r.du));
            int cy = static_cast<int>(std::floor(r.v0 + tm * r.dv));
            cx = std::clamp(cx, 0, W - 1);
            cy = std::clamp(cy, 0, H - 1);
            const std::uint32_t id = static_cast<std::uint32_t>(cy) * W + cx;
            // corner slivers can land in the pixel just emitted; merge them
            if (cols.size() > row_begin && cols.back() == id) {
                vals.back() += tn - t;
            } else {
                cols.push_back(id);
                vals.push_back(tn - t);
            }
        }
        if (tx <= tn) tx += inv_du;
        if (ty <= tn) ty += inv_dv;
        t = tn;
    }
}

}  // namespace

std::vector<double> SystemMatrix::row_norms_sq() const {
    std::vector<double> norms(n_rows, 0.0);
    for (int i = 0; i < n_rows; ++i) {
        double s = 0.0;
        for (double v : row_vals(i)) s += v * v;
        norms[i] = s;
    }
    return norms;
}

void Sinogram::validate() const {
    if (n_proj < 0 || n_det < 0 || values.size() != static_cast<std::size_t>(n_proj) * n_det)
        throw std::invalid_argument("Sinogram: values length must equal n_proj*n_det");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("Sinogram: non-finite value");
        if (noisy && v < 0.0) throw std::invalid_argument("Sinogram: negative noisy value");
    }
}

SystemMatrix build_system_matrix(const ProjectionGeometry& g) {
    if (g.grid_width < 1 || g.grid_height < 1 || g.n_det < 1 || g.schedule.n_proj < 1)
        throw std::invalid_argument("build_system_matrix: invalid geometry");

    SystemMatrix A;
    A.n_rows = g.n_rays();
    A.n_cols = g.grid_width * g.grid_height;
    A.row_start.reserve(A.n_rows + 1);
    A.row_start.push_back(0);
    A.cols.reserve(static_cast<std::size_t>(A.n_rows) * (g.grid_width + g.grid_height) / 2);
    A.vals.reserve(A.cols.capacity());

    for (int p = 0; p < g.schedule.n_proj; ++p) {
        for (int d = 0; d < g.n_det; ++d) {
            trace_ray(ray_for(g, p, d), g.grid_width, g.grid_height, A.cols, A.vals);
            A.row_start.push_back(A.cols.size());
        }
    }
    return A;
}

Sinogram forward_project(const SystemMatrix& A, const ImageGrid& x,
                         int n_proj, int n_det) {
    if (x.n_pixels() != A.n_cols)
        throw std::invalid_argument("forward_project: image pixel count does not match A.n_cols");
    if (n_proj * n_det != A.n_rows)
        throw std::invalid_argument("forward_project: n_proj*n_det does not match A.n_rows");

    Sinogram b;
    b.n_proj = n_proj;
    b.n_det = n_det;
    b.values.assign(A.n_rows, 0.0);
    const double* xv = x.values.data();
    for (int i = 0; i < A.n_rows; ++i) {
        double s = 0.0;
        const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
        for (std::size_t k = lo; k < hi; ++k) s += A.vals[k] * xv[A.cols[k]];
        b.values[i] = s;
    }
    return b;
}

ImageGrid back_project(const SystemMatrix& A, const Sinogram& b,
                       int grid_width, int grid_height) {
    if (b.n_rays() != A.n_rows)
        throw std::invalid_argument("back_project: sinogram length does not match A.n_rows");
    if (grid_width * grid_height != A.n_cols)
        throw std::invalid_argument("back_project: grid dimensions do not match A.n_cols");

    ImageGrid x(grid_width, grid_height, 0.0);
    double* xv = x.values.data();
    for (int i = 0; i < A.n_rows; ++i) {
        const double bi = b.values[i];
        if (bi == 0.0) continue;
        const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
        for (std::size_t k = lo; k < hi; ++k) xv[A.cols[k]] += A.vals[k] * bi;
    }
    return x;
}

double estimate_operator_norm(const SystemMatrix& A, int iterations, std::uint64_t seed) {
    if (iterations < 1) throw std::invalid_argument("estimate_operator_norm: iterations must be >= 1");

    std::mt19937_64 gen(splitmix64(seed));
    std::vector<double> v(A.n_cols), av(A.n_rows), w(A.n_cols);
    for (double& vi : v) vi = uniform(gen, -1.0, 1.0);

    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        // av = A v
        for (int i = 0; i < A.n_rows; ++i) {
            double s = 0.0;
            const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
            for (std::size_t k = lo; k < hi; ++k) s += A.vals[k] * v[A.cols[k]];
            av[i] = s;
        }
        // w = A^T av
        std::fill(w.begin(), w.end(), 0.0);
        for (int i = 0; i < A.n_rows; ++i) {
            const double bi = av[i];
            if (bi == 0.0) continue;
            const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
            for (std::size_t k = lo; k < hi; ++k) w[A.cols[k]] += A.vals[k] * bi;
        }
        double wn = 0.0;
        for (double wi : w) wn += wi * wi;
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = w[j] / wn;
        // Rayleigh quotient of A^T A at the updated v is |A v|^2.
        double s2 = 0.0;
        for (int i = 0; i < A.n_rows; ++i) {
            double s = 0.0;
            const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
            for (std::size_t k = lo; k < hi; ++k) s += A.vals[k] * v[A.cols[k]];
            s2 += s * s;
        }
        est = std::sqrt(s2);
    }
    return est;
}

void dump_triplets(const SystemMatrix& A, std::ostream& os) {
    for (int i = 0; i < A.n_rows; ++i) {
        const std::size_t lo = A.row_start[i], hi = A.row_start[i + 1];
        for (std::size_t k = lo; k < hi; ++k)
            os << i << ' ' << A.cols[k] << ' ' << A.vals[k] << '\n';
    }
}

}  // namespace tomo
