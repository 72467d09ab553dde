"""Exact symbolic engine for the standard-ordered star product on T*SU(2)^N and its BRST reduction."""

from .phasealg import PhasePoly, PhaseRing
from .scalars import GaussQ, Series

__all__ = ["PhaseRing", "PhasePoly", "GaussQ", "Series"]
__version__ = "0.1.0"
