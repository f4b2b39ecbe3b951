#include "tomo/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tomo {

ImageGrid::ImageGrid(int w, int h, double fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {
    if (w < 1 || h < 1) throw std::invalid_argument("ImageGrid: width and height must be >= 1");
}

void ImageGrid::validate(bool require_nonneg) const {
    if (width < 1 || height < 1)
        throw std::invalid_argument("ImageGrid: width and height must be >= 1");
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("ImageGrid: values length must equal width*height");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("ImageGrid: non-finite value");
        if (require_nonneg && v < 0.0)
            throw std::invalid_argument("ImageGrid: negative value with nonnegativity required");
    }
}

TiltSchedule make_tilt_schedule(double theta_max_deg, int n_proj) {
    if (!(theta_max_deg > 0.0) || theta_max_deg > 90.0)
        throw std::invalid_argument("make_tilt_schedule: theta_max must be in (0, 90], got " +
                                    std::to_string(theta_max_deg));
    if (n_proj < 1)
        throw std::invalid_argument("make_tilt_schedule: n_proj must be >= 1, got " +
                                    std::to_string(n_proj));

    TiltSchedule s;
    s.theta_max_deg = theta_max_deg;
    s.n_proj = n_proj;
    s.angles_deg.resize(n_proj);
    // Endpoint-exclusive on the upper end so +/-90 schedules do not duplicate
    // the identical parallel-beam ray set.
    const double step = 2.0 * theta_max_deg / n_proj;
    for (int i = 0; i < n_proj; ++i) s.angles_deg[i] = -theta_max_deg + i * step;
    return s;
}

ProjectionGeometry make_geometry(int grid_width, int grid_height, int n_det,
                                 const TiltSchedule& schedule, double det_spacing) {
    if (grid_width < 1 || grid_height < 1)
        throw std::invalid_argument("make_geometry: grid dimensions must be >= 1");
    if (n_det < 1) throw std::invalid_argument("make_geometry: n_det must be >= 1");
    if (!(det_spacing > 0.0)) throw std::invalid_argument("make_geometry: det_spacing must be > 0");
    if (schedule.n_proj < 1 || schedule.angles_deg.size() != static_cast<std::size_t>(schedule.n_proj))
        throw std::invalid_argument("make_geometry: schedule has no angles");
    return ProjectionGeometry{grid_width, grid_height, n_det, det_spacing, schedule};
}

int sufficient_projection_number(int grid_width, int grid_height, int n_det) {
    if (grid_width < 1 || grid_height < 1 || n_det < 1)
        throw std::invalid_argument("sufficient_projection_number: dimensions must be positive");
    const long long n_pix = static_cast<long long>(grid_width) * grid_height;
    return static_cast<int>((n_pix + n_det - 1) / n_det);
}

}  // namespace tomo
