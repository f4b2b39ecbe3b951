"""Parallel-beam tomography with l1 and TV constrained reconstruction."""

from ._core import (
    Projector,
    apply_poisson_dose,
    gradient_magnitude,
    measure_snr,
    pixel_sparse_phantom,
    pixel_sparsity,
    ptc_like_phantom,
    rmse,
    solve_l1,
    solve_tv,
    sufficient_projection_number,
    tilt_schedule,
    tv_gradient,
    tv_norm,
)

__all__ = [
    "Projector",
    "apply_poisson_dose",
    "gradient_magnitude",
    "measure_snr",
    "pixel_sparse_phantom",
    "pixel_sparsity",
    "ptc_like_phantom",
    "rmse",
    "solve_l1",
    "solve_tv",
    "sufficient_projection_number",
    "tilt_schedule",
    "tv_gradient",
    "tv_norm",
]
