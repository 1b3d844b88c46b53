"""Exact word problems for groups generated by rational-angle rotations of R^3."""

__version__ = "0.1.0"
