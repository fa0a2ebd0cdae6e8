"""Finite commutative rings, square-zero extensions, 2-extensions and butterflies."""

__version__ = "0.1.0"
