"""Spectra of Hill-Schroedinger operators with singular periodic potentials."""

__version__ = "0.1.0"
