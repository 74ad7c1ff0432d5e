"""Backend selection for the hot pair kernels.

The compiled extension (dyadicproj._core, Cython) is used when it imported
successfully; otherwise the numpy fallback (_core_py) takes over.  Setting
the environment variable DYADICPROJ_PURE_PYTHON=1 before import forces the
fallback.  Both backends implement the same three functions with matching
integer results.
"""

from __future__ import annotations

import os

import numpy as np

from . import _core_py

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _core = None

if os.environ.get("DYADICPROJ_PURE_PYTHON"):
    _active = _core_py
else:
    _active = _core if _core is not None else _core_py

__all__ = [
    "backend_name",
    "available_backends",
    "coincidence_count",
    "riesz_pair_sum",
]


def backend_name() -> str:
    return "compiled" if _active is not None and _active is _core else "python"


def available_backends() -> dict:
    out = {"python": _core_py}
    if _core is not None:
        out["compiled"] = _core
    return out


def coincidence_count(coords: np.ndarray, delta: float, backend=None) -> int:
    """Ordered pairs (diagonal included) of rows within Euclidean distance delta."""
    impl = backend or _active
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    if coords.ndim != 2:
        raise ValueError("coords must be a 2-D array")
    if coords.shape[1] == 1:
        z = np.sort(coords[:, 0])
        return int(impl.pair_count_sorted_1d(z, float(delta)))
    order = np.argsort(coords[:, 0], kind="stable")
    return int(impl.pair_count_nd(np.ascontiguousarray(coords[order]), float(delta)))


def riesz_pair_sum(points: np.ndarray, power: int, backend=None) -> float:
    """Sum of |x - y|^-power over ordered pairs of distinct rows."""
    impl = backend or _active
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two rows")
    if power < 1:
        raise ValueError("power must be a positive integer")
    return float(impl.riesz_pair_sum(points, int(power)))
