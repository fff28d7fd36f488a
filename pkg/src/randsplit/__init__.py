"""Randomized continuous-time splitting of two non-smooth subgradient flows.

Simulators for the switched composition of exact subflows (L1 sparse
inversion and discrete Allen-Cahn classification), deterministic baselines,
and the diagnostics that verify their long-time and high-switching-rate
behaviour at desk scale.
"""

from ._kernels import backend as kernel_backend

__version__ = "0.1.0"

__all__ = ["__version__", "kernel_backend"]
