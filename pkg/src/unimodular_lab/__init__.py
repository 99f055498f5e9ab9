"""Exact computations with unimodular rows, elementary paths, orbit group laws
and Euler-class witnesses."""

__version__ = "0.1.0"
