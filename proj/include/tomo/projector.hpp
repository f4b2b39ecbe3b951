#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tomo/geometry.hpp"

namespace tomo {

// Sparse ray/pixel intersection operator in compressed row form.
// Row i holds the exact intersection lengths of ray i with each pixel it
// crosses; rays that miss the grid have empty rows.
struct SystemMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::size_t> row_start;  // length n_rows + 1
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;

    std::span<const std::uint32_t> row_cols(int i) const {
        return {cols.data() + row_start[i], row_start[i + 1] - row_start[i]};
    }
    std::span<const double> row_vals(int i) const {
        return {vals.data() + row_start[i], row_start[i + 1] - row_start[i]};
    }
    std::size_t nnz() const { return vals.size(); }

    // Squared euclidean norm of each row; zero for empty rows.
    std::vector<double> row_norms_sq() const;
};

// Measured data b: one line-integral value per ray, n_proj x n_det,
// projection-major. Poisson-corrupted data carries its dose.
struct Sinogram {
    int n_proj = 0;
    int n_det = 0;
    std::vector<double> values;
    std::optional<double> dose;  // total electron counts N_e when noisy
    bool noisy = false;

    int n_rays() const { return n_proj * n_det; }
    void validate() const;
};

SystemMatrix build_system_matrix(const ProjectionGeometry& geometry);

Sinogram forward_project(const SystemMatrix& A, const ImageGrid& x,
                         int n_proj, int n_det);

ImageGrid back_project(const SystemMatrix& A, const Sinogram& b,
                       int grid_width, int grid_height);

// Power-iteration estimate of the largest singular value of A.
// Non-decreasing in the iteration count; deterministic for a fixed seed.
double estimate_operator_norm(const SystemMatrix& A, int iterations,
                              std::uint64_t seed);

// Debug dump as text triplets "row col length". Not a stable format.
void dump_triplets(const SystemMatrix& A, std::ostream& os);

}  // namespace tomo
