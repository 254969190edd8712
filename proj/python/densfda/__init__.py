"""Functional data analysis for samples of densities.

Densities are numpy arrays of values on a uniform grid over [lo, hi]; a
sample is a 2-d array with one density per row.
"""

from ._core import (
    Error,
    __version__,
    dist_l2,
    dist_wasserstein,
    estimate_density,
    forward,
    frechet_mean,
    fve,
    inverse,
    mode,
    normalize,
    represent,
    simulate,
)

__all__ = [
    "Error",
    "__version__",
    "dist_l2",
    "dist_wasserstein",
    "estimate_density",
    "forward",
    "frechet_mean",
    "fve",
    "inverse",
    "mode",
    "normalize",
    "represent",
    "simulate",
]
