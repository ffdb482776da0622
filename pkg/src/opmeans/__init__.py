"""Kubo–Ando operator means, Löwner order, and operator log-convexity checks."""

__version__ = "0.1.0"
