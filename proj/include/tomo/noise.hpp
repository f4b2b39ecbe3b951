#pragma once

#include <cstdint>

#include "tomo/projector.hpp"

namespace tomo {

// Total detector electron budget for one tilt series.
struct DoseSpec {
    double total_counts = 0.0;  // N_e
    std::uint64_t seed = 0;
};

// Exact forward projection; noisy flag false, no dose attached.
Sinogram simulate_ideal_data(const SystemMatrix& A, const ImageGrid& x_true,
                             int n_proj, int n_det);

// Scale the clean line integrals so the expected total detector counts equal
// N_e, draw independent Poisson counts, and rescale back to line-integral
// units. Deterministic per seed.
Sinogram apply_poisson_dose(const Sinogram& b_clean, const DoseSpec& dose);

// Global l2 signal-to-noise ratio |b_clean| / |b_noisy - b_clean|.
// Identical inputs report +infinity.
double measure_snr(const Sinogram& b_clean, const Sinogram& b_noisy);

}  // namespace tomo
