#include "tomo/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace tomo {

double rmse(const ImageGrid& x, const ImageGrid& x_ref) {
    if (x.width != x_ref.width || x.height != x_ref.height)
        throw std::invalid_argument("rmse: image dimensions differ");
    double s = 0.0;
    for (std::size_t j = 0; j < x.values.size(); ++j) {
        const double d = x.values[j] - x_ref.values[j];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(x.values.size()));
}

ImageGrid gradient_magnitude(const ImageGrid& x) {
    ImageGrid g(x.width, x.height, 0.0);
    const int W = x.width, H = x.height;
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            const double v = x.at(r, c);
            const double dx = (c + 1 < W) ? x.at(r, c + 1) - v : 0.0;
            const double dy = (r + 1 < H) ? x.at(r + 1, c) - v : 0.0;
            g.at(r, c) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return g;
}

double pixel_sparsity(const ImageGrid& x) {
    std::size_t nz = 0;
    for (double v : x.values)
        if (v != 0.0) ++nz;
    return static_cast<double>(nz) / static_cast<double>(x.values.size());
}

bool is_recovered(const ImageGrid& x, const ImageGrid& x_ref, const RecoveryRule& rule) {
    return rmse(x, x_ref) <= rule.rmse_threshold;
}

}  // namespace tomo
