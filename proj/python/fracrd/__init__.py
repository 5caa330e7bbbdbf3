"""Space-time fractional reaction-diffusion solver and its verification checks."""

from ._fracrd import *  # noqa: F401,F403
from ._fracrd import __version__


def gaussian(grid, amplitude=0.1, width=0.3, center=0.0):
    """Gaussian bump sampled on a 1D grid."""
    import numpy as np

    x = np.asarray(grid.coords())
    return amplitude * np.exp(-((x - center) ** 2) / width**2)
