"""Directional entropy of integer characteristic polynomials in Weyl-chamber tubes."""

__version__ = "0.1.0"
