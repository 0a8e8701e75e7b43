"""Small helpers for dense object arrays of expressions."""

from __future__ import annotations

import numpy as np

from .expr import ZERO, as_expr, evaluate_array, is_zero, simplify


def zeros(shape):
    """Object array of the given shape filled with the symbolic zero."""
    arr = np.empty(shape, dtype=object)
    arr.fill(ZERO)
    return arr


def to_array(rows):
    """Nested lists of expressions or numbers -> object array of Expr."""
    src = np.asarray(rows, dtype=object)
    out = np.empty(src.shape, dtype=object)
    for idx in np.ndindex(src.shape):
        out[idx] = as_expr(src[idx])
    return out


def amap(fn, arr):
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = fn(arr[idx])
    return out


def simplify_array(arr):
    return amap(simplify, arr)


def all_zero(arr):
    """True when every entry is the literal symbolic zero."""
    return all(is_zero(e) for e in np.asarray(arr, dtype=object).ravel())


def sub(a, b):
    out = np.empty(a.shape, dtype=object)
    for idx in np.ndindex(a.shape):
        out[idx] = a[idx] - b[idx]
    return out


def residual_stats(arrs, chart, points):
    """Max |entry| over points for residual arrays, skipping undefined points.

    Returns ``(max_abs, evaluated, skipped)``; a point is skipped when any
    entry of any array is undefined there.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = [evaluate_array(a, chart, pts).reshape(len(pts), -1) for a in arrs if np.size(a)]
    if not vals:
        return 0.0, len(pts), 0
    flat = np.concatenate(vals, axis=1)
    ok = np.all(np.isfinite(flat), axis=1)
    skipped = int(np.count_nonzero(~ok))
    if ok.any() and flat.shape[1]:
        mx = float(np.max(np.abs(flat[ok])))
    else:
        mx = 0.0 if ok.any() else float("nan")
    return mx, len(pts), skipped
