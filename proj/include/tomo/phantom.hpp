#pragma once

#include <cstdint>
#include <vector>

#include "tomo/geometry.hpp"

namespace tomo {

enum class PhantomKind { PixelSparse, PtcLike };

struct PhantomSpec {
    PhantomKind kind = PhantomKind::PtcLike;
    int width = 256;
    int height = 256;
    double k_target = 0.1;  // non-zero pixel fraction, pixel-sparse only
    std::uint64_t seed = 0;
    double carbon_level = 0.03;
    double particle_level = 0.75;
};

// Internal construction masks, exposed for verification.
struct PtcDebug {
    std::vector<std::uint8_t> support_mask;  // 1 where the support blob was painted
    int n_particles = 0;
    int n_pores = 0;
};

// Random union of overlapping discs calibrated to k_target non-zero pixels.
// Deterministic per seed; intensities in (0, 1].
ImageGrid generate_pixel_sparse(const PhantomSpec& spec);

// Piecewise-constant catalyst-style phantom: porous support at the carbon
// level with high-intensity particle discs, calibrated to a gradient-
// magnitude sparsity of about 3.3%. Deterministic per seed.
ImageGrid generate_ptc_like(const PhantomSpec& spec, PtcDebug* debug = nullptr);

}  // namespace tomo
