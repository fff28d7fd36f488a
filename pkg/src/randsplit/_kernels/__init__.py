"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; the fallback is the
bit-identical reference implementation.  ``backend()`` reports which one is
active, and ``benchmarks/bench_backends.py`` compares their throughput.
"""

from . import _pure

try:
    from ._scalar_pdmp import scalar_switched_path

    _BACKEND = "cython"
except ImportError:  # extension not built; fall back to the reference loop
    from ._pure import scalar_switched_path

    _BACKEND = "pure"


def backend() -> str:
    """Name of the active kernel backend: 'cython' or 'pure'."""
    return _BACKEND


__all__ = ["scalar_switched_path", "backend", "_pure"]
