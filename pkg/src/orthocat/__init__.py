"""Orthoscheme complexes, Birkhoff representations and CAT(0) checks."""

__version__ = "0.1.0"
