"""Exact combinatorial modules of the quantum toroidal gl(2) algebra."""

__version__ = "0.1.0"
