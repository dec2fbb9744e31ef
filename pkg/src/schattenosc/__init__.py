"""Schatten-Lorentz norms of commutators and oscillation norms on metric measure spaces."""

__version__ = "0.1.0"
