"""Reproducible quasi-random sample points in coordinate boxes."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc


def halton_box(box, num, seed=0):
    """``num`` scrambled Halton points in the box [(lo, hi), ...]."""
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    if np.any(hi < lo):
        raise ValueError("empty sample interval")
    unit = qmc.Halton(d=len(box), scramble=True, seed=seed).random(num)
    return lo + unit * (hi - lo)


def sample_points(box, num, seed=0, v_slots=(), min_abs_v=0.0):
    """Halton points, dropping those with |y| < min_abs_v in any of the ``v_slots`` columns."""
    if num < 1:
        raise ValueError("need at least one sample point")
    if not v_slots or min_abs_v <= 0.0:
        return halton_box(box, num, seed)
    want = num
    batch = 2 * num + 16
    for _ in range(8):
        pts = halton_box(box, batch, seed)
        keep = np.all(np.abs(pts[:, list(v_slots)]) >= min_abs_v, axis=1)
        if np.count_nonzero(keep) >= want:
            return pts[keep][:want]
        batch *= 2
    raise ValueError("sample box leaves too few points away from the excluded |y| band")
