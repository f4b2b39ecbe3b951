#pragma once

#include <vector>

namespace tomo {

// 2D pixel intensity array, row-major. Row r, column c lives at r*width + c.
// Pixel size is fixed at 1 grid unit; intensities are dimensionless.
struct ImageGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ImageGrid() = default;
    ImageGrid(int w, int h, double fill = 0.0);

    int n_pixels() const { return width * height; }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }

    // Throws std::invalid_argument on dimension or finiteness violations.
    void validate(bool require_nonneg = false) const;
};

// Evenly spaced tilt angles over [-theta_max, +theta_max], endpoint-exclusive
// on the upper end: angle_i = -theta_max + i * (2 theta_max / n_proj).
struct TiltSchedule {
    double theta_max_deg = 90.0;
    int n_proj = 0;
    std::vector<double> angles_deg;
};

// Parallel-beam layout: n_det detector bins spaced det_spacing grid units,
// centered on the grid center, one ray per bin.
struct ProjectionGeometry {
    int grid_width = 0;
    int grid_height = 0;
    int n_det = 0;
    double det_spacing = 1.0;
    TiltSchedule schedule;

    int n_rays() const { return schedule.n_proj * n_det; }
};

TiltSchedule make_tilt_schedule(double theta_max_deg, int n_proj);

ProjectionGeometry make_geometry(int grid_width, int grid_height, int n_det,
                                 const TiltSchedule& schedule,
                                 double det_spacing = 1.0);

// Counting-bound sufficient projection number: ceil(width*height / n_det).
// Relative sampling is mu = N_p / sufficient_projection_number.
int sufficient_projection_number(int grid_width, int grid_height, int n_det);

}  // namespace tomo
