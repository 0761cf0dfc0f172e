"""Exact and numerical tools for ML-degrees of Gaussian graphical models."""

__version__ = "0.1.0"
