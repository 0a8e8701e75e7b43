"""Constant-coefficient d-connections for constant d-metrics with a linear N-connection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import residual_stats, to_array, zeros
from .errors import DegenerateMetric, NonConstantRHS
from .expr import as_expr, deriv, is_const, is_zero, simplify
from .frames import NConnection


@dataclass(frozen=True)
class ConstDMetric:
    g0: np.ndarray
    h0: np.ndarray

    def __post_init__(self):
        for name in ("g0", "h0"):
            M = np.array(getattr(self, name), dtype=float)
            if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T, atol=0.0):
                raise ValueError(f"{name} must be a symmetric square matrix")
            if abs(np.linalg.det(M)) <= 1e-12 * max(np.max(np.abs(M)), 1e-300) ** len(M):
                raise DegenerateMetric(f"{name} is singular")
            object.__setattr__(self, name, M)

    @property
    def h0_inv(self):
        return np.linalg.inv(self.h0)

    @property
    def g0_inv(self):
        return np.linalg.inv(self.g0)


@dataclass(frozen=True)
class ConstDConnection:
    """L0[a, b, k]; every other coefficient block vanishes."""

    L0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L0", np.array(self.L0, dtype=float))

    def as_dconnection(self, chart):
        from .connections import DConnection

        n, m = chart.n, chart.m
        return DConnection(chart, zeros((n, n, n)), to_array(self.L0), zeros((n, n, m)), zeros((m, m, m)),
                           "constant")


def _h0_matrix(h0):
    return h0.h0 if isinstance(h0, ConstDMetric) else np.array(h0, dtype=float)


def auxf1_residual(ncon, h0, L0):
    """Object array 2 L0^a_bk - (dN^a_k/dy^b - h0^ac h0_db dN^d_k/dy^c)."""
    chart = ncon.chart
    n, m = chart.n, chart.m
    H = _h0_matrix(h0)
    Hi = np.linalg.inv(H)
    L = L0.L0 if isinstance(L0, ConstDConnection) else np.asarray(L0, dtype=float)
    y = chart.v_names
    dN = [[[deriv(ncon.N[a, k], y[b]) for b in range(m)] for k in range(n)] for a in range(m)]
    out = zeros((m, m, n))
    for a in range(m):
        for b in range(m):
            for k in range(n):
                s = as_expr(2.0 * L[a, b, k]) - dN[a][k][b]
                for c in range(m):
                    for d in range(m):
                        coef = Hi[a, c] * H[d, b]
                        if coef != 0.0 and not is_zero(dN[d][k][c]):
                            s = s + coef * dN[d][k][c]
                out[a, b, k] = simplify(s)
    return out


def verify_auxf1(ncon, h0, L0, points):
    """(max |residual|, evaluated, skipped) of the constant-connection condition."""
    return residual_stats([auxf1_residual(ncon, h0, L0)], ncon.chart, points)


def linear_coefficients(ncon):
    """A[a, k, b] with N^a_k = A^a_kb y^b + (y-independent part); NonConstantRHS otherwise."""
    chart = ncon.chart
    n, m = chart.n, chart.m
    A = np.zeros((m, n, m))
    for a in range(m):
        for k in range(n):
            for b in range(m):
                d = simplify(deriv(ncon.N[a, k], chart.v_names[b]))
                if not is_const(d):
                    raise NonConstantRHS(f"dN[{a},{k}]/d{chart.v_names[b]} = {d} is not constant")
                A[a, k, b] = d.payload
    return A


def solve_auxf1_linear(h0, family):
    """L0^a_bk = 1/2 (A^a_kb - h0^ac h0_db A^d_kc).

    ``family`` is an NConnection linear in y or the coefficient array A[a, k, b].
    """
    A = linear_coefficients(family) if isinstance(family, NConnection) else np.asarray(family, dtype=float)
    H = _h0_matrix(h0)
    Hi = np.linalg.inv(H)
    # sandwich[a, k, b] = h0^ac A^d_kc h0_db
    sandwich = np.einsum("ac,dkc,db->akb", Hi, A, H)
    L0 = 0.5 * (A - sandwich)
    return ConstDConnection(np.transpose(L0, (0, 2, 1)).copy())


def const_curvature(L0):
    """R0[a, b, j, k] = L0^c_bj L0^a_ck - L0^c_bk L0^a_cj."""
    L = L0.L0 if isinstance(L0, ConstDConnection) else np.asarray(L0, dtype=float)
    t = np.einsum("cbj,ack->abjk", L, L)
    return t - np.transpose(t, (0, 1, 3, 2))


def const_full_curvature(g0, L0):
    """Full curvature array of the constant connection (only the R^a_bjk block is nonzero)."""
    L = L0.L0 if isinstance(L0, ConstDConnection) else np.asarray(L0, dtype=float)
    m, _, n = L.shape
    dim = n + m
    R = np.zeros((dim,) * 4)
    R[n:, n:, :n, :n] = const_curvature(L)
    return R


def const_scalar(dmc, L0):
    """g0^ij R_ij + h0^ab S_ab with Ricci_bg = R^a_bga of the constant connection."""
    R = const_full_curvature(dmc.g0, L0)
    n = dmc.g0.shape[0]
    Ric = np.einsum("abga->bg", R)
    return float(np.einsum("ij,ij->", dmc.g0_inv, Ric[:n, :n]) + np.einsum("ab,ab->", dmc.h0_inv, Ric[n:, n:]))


def constancy_variance(arr, chart, points):
    """Max over components of the sample variance across points; NaN points dropped."""
    from .expr import evaluate_array

    vals = evaluate_array(arr, chart, points).reshape(len(points), -1)
    vals = vals[np.all(np.isfinite(vals), axis=1)]
    skipped = len(points) - len(vals)
    if not len(vals):
        return float("nan"), len(points), skipped
    return float(np.max(np.var(vals, axis=0))) if vals.shape[1] else 0.0, len(points), skipped


def _max_abs(arrs, chart, points):
    from .arrays import residual_stats

    return residual_stats(arrs, chart, points)


def table1_report(model):
    """Levi-Civita vs the d-connection of the d-metric vs the constant-coefficient connection.

    ``model`` is a pipeline Model.  Compatibility residuals are pass/fail
    records; coefficient, torsion, distortion and curvature sizes go to the
    report's data table.
    """
    from . import connections as cn
    from . import curvature as cv
    from .frames import anholonomy
    from .report import CheckReport

    chart = model.chart
    pts = model.pts
    rep = CheckReport(model.sc.name)
    table = {}
    lc_stats = _max_abs([model.lc.G], chart, pts)
    lcR = _max_abs([model.lc_riemann], chart, pts)
    table["levi_civita"] = {
        "frame": "coordinate",
        "max_coefficient": _num(lc_stats[0]),
        "max_torsion": 0.0,
        "max_distortion": 0.0,
        "max_curvature": _num(lcR[0]),
        "scalar_variance": _num(constancy_variance(np.array([model.lc_scalar], dtype=object), chart, pts)[0]),
    }
    rep.add("levi_civita.compat", _max_abs([cn.metric_derivative_residual(model.lc)], chart, pts), 1e-10)

    dc = model.dc
    comp = cn.compatibility_residuals(model.dm, dc, None, pts)
    table[f"{dc.label}_d_connection"] = {
        "frame": "adapted",
        "max_coefficient": _num(_max_abs([dc.full], chart, pts)[0]),
        "max_torsion": _num(_max_abs([model.torsion], chart, pts)[0]),
        "max_distortion": _num(_max_abs([model.Z], chart, pts)[0]),
        "max_curvature": _num(_max_abs([model.curv.full], chart, pts)[0]),
        "scalar_variance": _num(constancy_variance(np.array([model.dscalar], dtype=object), chart, pts)[0]),
    }
    rep.add(f"{dc.label}_d_connection.compat", comp["Dg"], 1e-10)

    if model.constcoeff:
        const = model.const_dc
        anh = anholonomy(model.ncon)
        R = cv.curvature_from_coefficients(const.full, anh.w, model.ncon.e)
        dist = np.empty(const.full.shape, dtype=object)
        for idx in np.ndindex(dist.shape):
            dist[idx] = model.lc_adapted[idx] - const.full[idx]
        scal = cv.dscalar(model.dm, cv.dricci(R))
        table["constant_coefficients"] = {
            "frame": "adapted",
            "max_coefficient": _num(float(np.max(np.abs(model.L0.L0)))),
            "max_torsion": _num(_max_abs([cn.torsion(const, anh)], chart, pts)[0]),
            "max_distortion": _num(_max_abs([dist], chart, pts)[0]),
            "max_curvature": _num(_max_abs([R], chart, pts)[0]),
            "scalar_variance": _num(constancy_variance(np.array([scal], dtype=object), chart, pts)[0]),
        }
        rep.add("constant_coefficients.compat",
                _max_abs([cn.covariant_derivative_2(const, model.ncon, model.dm.adapted)], chart, pts), 1e-10)
    else:
        table["constant_coefficients"] = "not applicable"
    rep.data["table"] = table
    return rep


def _num(x):
    return float(f"{float(x):.6e}")
