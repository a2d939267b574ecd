"""Numerical laboratory for unipotent and diagonal flows on homogeneous spaces."""

__version__ = "0.1.0"
