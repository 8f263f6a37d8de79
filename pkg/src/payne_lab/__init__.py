"""Numerical laboratory for Dirichlet vs. clamped-buckling eigenvalues on convex domains."""

__version__ = "0.1.0"
