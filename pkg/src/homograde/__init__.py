"""Graded commutative algebra over small quotient rings: Groebner bases, resolutions,
Ext/Tor, homological invariants and a formula-checking harness."""

__version__ = "0.1.0"
