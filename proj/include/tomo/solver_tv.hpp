#pragma once

#include <cstdint>
#include <vector>

#include "tomo/geometry.hpp"
#include "tomo/projector.hpp"
#include "tomo/recon.hpp"

namespace tomo {

// Smoothed total variation: sum over pixels of sqrt(dx^2 + dy^2 + delta^2)
// with forward differences and replicated boundary, accumulated in row-major
// order. At delta = 0 this equals the plain sum of gradient magnitudes.
double tv_norm(const ImageGrid& x, double delta);

// Gradient of tv_norm with respect to each pixel, same stencil. Terms with a
// vanishing smoothed magnitude (only possible at delta = 0) contribute zero.
std::vector<double> tv_gradient(const ImageGrid& x, double delta);

// Cosine of the angle between two vectors; 0 when either has zero norm.
double cosine_alpha(const std::vector<double>& u, const std::vector<double>& v);

struct TvOptions {
    double epsilon = 0.0;      // target data-residual norm
    double beta0 = 1.0;        // initial ART relaxation
    double beta_red = 0.995;   // per-iteration relaxation decay
    int n_tv_steps = 20;       // gradient-descent substeps per iteration
    double alpha0 = 0.2;       // TV step length as a fraction of the data step
    double alpha_red = 0.95;   // step-length decay when TV moves too far
    double r_max = 0.95;       // max allowed ratio d_tv / d_data
    double delta = 1e-8;       // TV smoothing parameter
    int max_iters = 10000;
    bool nonneg = true;
    double c_alpha_stop = -0.95;   // steps must be nearly opposed
    double resid_band = 1e-4;      // |E - epsilon| / epsilon at termination
    double eps_zero_abs = 1e-8;    // absolute residual target when epsilon = 0
    // Debug: count TV substeps that increase the smoothed TV (see ReconResult).
    bool check_tv_monotone = false;
};

// Alternating data-consistency / TV-descent reconstruction: each iteration
// runs one relaxed ART sweep over all rays in index order, clamps negatives,
// then takes n_tv_steps normalized TV-gradient steps. The TV step length is
// set once from the first data step (alpha0 * d_data) and afterwards only
// shrinks, by alpha_red, when the TV move outpaces the data move while the
// residual is still above epsilon. Terminates converged once the two steps
// nearly cancel (cosine <= c_alpha_stop) and the residual sits on the
// epsilon ball; otherwise stops at max_iters.
ReconResult solve_tv_asdpocs(const SystemMatrix& A, const Sinogram& b,
                             int grid_width, int grid_height,
                             const TvOptions& opts);

}  // namespace tomo
