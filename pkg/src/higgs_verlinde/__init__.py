"""Deformed Verlinde numbers for SU(N): a numeric Bethe path and an exact SU(2) TQFT path."""

__version__ = "0.1.0"
