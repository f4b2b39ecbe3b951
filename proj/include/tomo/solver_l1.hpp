#pragma once

#include <cstdint>

#include "tomo/projector.hpp"
#include "tomo/recon.hpp"

namespace tomo {

struct L1Options {
    double epsilon = 0.0;  // data tolerance; 0 solves the equality form
    bool nonneg = false;
    int max_iters = 20000;
    double tol_primal = 1e-6;  // relative feasibility tolerance
    double tol_dual = 1e-6;    // relative iterate-stagnation tolerance
    std::uint64_t seed = 0;    // operator-norm estimation
};

// Basis pursuit min |x|_1 s.t. |Ax - b|_2 <= epsilon via a first-order
// primal-dual iteration; the epsilon-ball constraint is handled by shrinking
// the dual variable, nonnegativity by projecting the primal iterate.
ReconResult solve_l1(const SystemMatrix& A, const Sinogram& b,
                     int grid_width, int grid_height, const L1Options& opts);

}  // namespace tomo
