"""Spectra and dynamics of 1D Schrodinger operators under unitary boundary conditions."""

from . import bc, cli, curves, domain, edge, expr, odesolve, oracle, spectral  # noqa: F401

__all__ = ["bc", "cli", "curves", "domain", "edge", "expr", "odesolve", "oracle", "spectral"]
__version__ = "0.1.0"
