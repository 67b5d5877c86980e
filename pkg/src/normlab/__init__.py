"""normlab: a desk-scale laboratory for genericity along subsequences.

Generate trajectories generic for shift-invariant laws, restrict them
along subsets of the integers, compare counted block frequencies with
exact cylinder and spread-block values, and reproduce the classical
preservation results and their destruction counterparts empirically.
"""
from . import contfrac, empirics, lab, measures, selectors, sources

__all__ = ["contfrac", "empirics", "lab", "measures", "selectors", "sources"]
__version__ = "0.1.0"
