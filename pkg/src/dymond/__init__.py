"""Motif-based generation and evaluation of dynamic networks."""

__version__ = "0.1.0"
