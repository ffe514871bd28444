"""Binomial line process toolkit.

Samplers and closed-form statistics for a line process with a fixed
number of lines through a bounded generation domain, the Cox point
process it carries, and SINR-level wireless metrics (coverage, meta
distribution, local delay), each backed by a Monte Carlo counterpart.
"""

from .geometry import (
    BlcpModel,
    BlpModel,
    LineParams,
    PlanePoint,
    Realization,
    sample_blcp,
    sample_blp,
)
from .metrics import DIVERGENT, MetaQuery, RadioParams
from .montecarlo import Estimate, McConfig
from .curves import CurveTable

__all__ = [
    "BlcpModel",
    "BlpModel",
    "LineParams",
    "PlanePoint",
    "Realization",
    "sample_blcp",
    "sample_blp",
    "DIVERGENT",
    "MetaQuery",
    "RadioParams",
    "Estimate",
    "McConfig",
    "CurveTable",
]
