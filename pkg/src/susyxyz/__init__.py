"""Numerical laboratory for lattice supersymmetry of the XYZ chain,
its eight-vertex transfer matrix, and staggered hard-core fermions."""

__version__ = "0.1.0"
