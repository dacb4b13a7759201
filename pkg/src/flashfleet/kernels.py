"""Kernel backend selection.

The compiled extension (flashfleet._kernels, built from Cython) is
preferred; the pure Python twin (flashfleet._kernels_py) is the
fallback when the extension is missing or when the environment
variable FLASHFLEET_PURE_PYTHON is set to a non-empty value. Both
expose the same functions with bit-identical results; only speed
differs. benchmarks/bench_kernels.py measures the gap.
"""

from __future__ import annotations

import os

from . import _kernels_py

__all__ = [
    "BACKEND",
    "UNREACHABLE",
    "available_backends",
    "get_backend",
    "dijkstra_row",
    "evaluate_sequence",
    "schedule_sequence",
    "enumerate_insertions",
    "solve_dense_assignment",
]


def _load_compiled():
    try:
        from . import _kernels  # built by setup.py; optional
    except ImportError:
        return None
    return _kernels


def available_backends() -> dict:
    """Map of backend name to module for every importable backend."""
    backends = {"pure": _kernels_py}
    compiled = _load_compiled()
    if compiled is not None:
        backends["compiled"] = compiled
    return backends


def get_backend(name: str):
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"kernel backend {name!r} not available")
    return backends[name]


if os.environ.get("FLASHFLEET_PURE_PYTHON"):
    _impl = _kernels_py
else:
    _impl = _load_compiled() or _kernels_py

BACKEND = _impl.backend_name()
UNREACHABLE = _impl.UNREACHABLE
dijkstra_row = _impl.dijkstra_row
evaluate_sequence = _impl.evaluate_sequence
schedule_sequence = _impl.schedule_sequence
enumerate_insertions = _impl.enumerate_insertions
solve_dense_assignment = _impl.solve_dense_assignment
