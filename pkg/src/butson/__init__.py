"""Butson-type Hadamard matrices: cocycles, equivalence and existence screens."""

__version__ = "0.1.0"
