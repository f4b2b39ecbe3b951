#pragma once

#include <iosfwd>
#include <vector>

#include "tomo/geometry.hpp"

namespace tomo {

// One entry of the per-iteration convergence log. The TV solver fills all
// fields; the l1 solver leaves c_alpha/beta/alpha at 0.
struct IterationLog {
    double residual = 0.0;   // |Ax - b|
    double objective = 0.0;  // |x|_1 or TV(x)
    double c_alpha = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
};

struct ReconResult {
    ImageGrid image;
    int iterations = 0;
    double residual_norm = 0.0;
    double objective = 0.0;
    bool converged = false;
    std::vector<IterationLog> diagnostics;  // one row per iteration
    // Debug counter (TV solver, check_tv_monotone): descent sub-steps that
    // increased the smoothed TV.
    int tv_monotone_violations = 0;
};

// CSV export of the convergence log: iteration, residual, objective,
// c_alpha, beta, alpha.
void write_diagnostics_csv(const ReconResult& result, std::ostream& os);

}  // namespace tomo
