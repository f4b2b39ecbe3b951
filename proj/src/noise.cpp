#include "tomo/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tomo/rng.hpp"

namespace tomo {

Sinogram simulate_ideal_data(const SystemMatrix& A, const ImageGrid& x_true,
                             int n_proj, int n_det) {
    return forward_project(A, x_true, n_proj, n_det);
}

Sinogram apply_poisson_dose(const Sinogram& b_clean, const DoseSpec& dose) {
    if (!(dose.total_counts > 0.0))
        throw std::invalid_argument("apply_poisson_dose: total_counts must be > 0");
    if (b_clean.noisy)
        throw std::invalid_argument("apply_poisson_dose: input must be ideal data");

    double total = 0.0;
    for (double v : b_clean.values) {
        if (v < 0.0) throw std::invalid_argument("apply_poisson_dose: negative clean value");
        total += v;
    }
    if (total == 0.0)
        throw std::invalid_argument("apply_poisson_dose: all-zero clean data cannot be scaled");

    const double scale = dose.total_counts / total;  // counts per line-integral unit
    std::mt19937_64 gen(splitmix64(dose.seed));

    Sinogram out = b_clean;
    out.noisy = true;
    out.dose = dose.total_counts;
    for (double& v : out.values) {
        if (v == 0.0) continue;  // Poisson(0) = 0
        std::poisson_distribution<long long> pois(scale * v);
        v = static_cast<double>(pois(gen)) / scale;
    }
    return out;
}

double measure_snr(const Sinogram& b_clean, const Sinogram& b_noisy) {
    if (b_clean.n_proj != b_noisy.n_proj || b_clean.n_det != b_noisy.n_det)
        throw std::invalid_argument("measure_snr: sinogram dimensions differ");
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < b_clean.values.size(); ++i) {
        const double c = b_clean.values[i];
        const double d = b_noisy.values[i] - c;
        sig += c * c;
        err += d * d;
    }
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(sig / err);
}

}  // namespace tomo
