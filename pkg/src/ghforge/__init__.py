"""Exact Gromov-Hausdorff distances, the 3-point cone, and Steiner stars in GH space."""

__version__ = "0.1.0"
