#pragma once

#include "tomo/geometry.hpp"

namespace tomo {

// Recovery rule from the phase-diagram protocol: a reconstruction counts as
// accurate when RMSE against the reference is at or below the threshold.
struct RecoveryRule {
    double rmse_threshold = 0.05;
};

double rmse(const ImageGrid& x, const ImageGrid& x_ref);

// Per-pixel sqrt((dx)^2 + (dy)^2) with forward differences and replicated
// boundary. Shares its stencil with tv_norm so the two stay consistent.
ImageGrid gradient_magnitude(const ImageGrid& x);

// Fraction of strictly non-zero pixels.
double pixel_sparsity(const ImageGrid& x);

bool is_recovered(const ImageGrid& x, const ImageGrid& x_ref, const RecoveryRule& rule);

}  // namespace tomo
