"""Exact verification workbench for operational probabilistic theories."""

__version__ = "0.1.0"
