"""Exact cut-Fock-space solver for two-dimensional SU(N) supersymmetric
Yang-Mills quantum mechanics, with closed-form Laguerre spectra."""

__version__ = "0.1.0"
