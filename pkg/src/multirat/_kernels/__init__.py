"""Solver kernel backends.

Imports the compiled extension when present, otherwise the pure-Python
reference implementation.  Both produce bit-identical results; BACKEND names
the one in use.
"""

try:
    from ._core import enumerate_best, refine, select_step  # type: ignore

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build environment
    from ._pure import enumerate_best, refine, select_step

    BACKEND = "pure"

__all__ = ["BACKEND", "enumerate_best", "refine", "select_step"]
