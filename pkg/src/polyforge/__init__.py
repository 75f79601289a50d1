"""Explicit integer polynomials whose quantified values define pathological indicators."""

__version__ = "0.1.0"
