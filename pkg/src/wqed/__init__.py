"""Pulse propagation through chirally coupled two-level emitters in a 1D waveguide.

Units: the chiral decay rate Gamma sets the time scale and the group
velocity is unity, so positions and times share the unit 1/Gamma.  All
engines report output fields in the frame comoving with a freely
propagating pulse (x = -t up to the drive reference time).
"""

from wqed.core import EmitterArray, Grid, PulseSpec, RunConfig, gaussian_mode, parse_config

__version__ = "0.1.0"

__all__ = [
    "EmitterArray",
    "Grid",
    "PulseSpec",
    "RunConfig",
    "gaussian_mode",
    "parse_config",
    "__version__",
]
