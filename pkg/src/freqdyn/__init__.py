"""Numerical laboratory for frequently hypercyclic sequences of composition operators."""

__version__ = "0.1.0"
