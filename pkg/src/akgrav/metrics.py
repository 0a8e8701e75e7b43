"""Block d-metrics, coordinate assembly, N extraction and pointwise frame matching."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import block_diag

from .arrays import to_array, zeros
from .errors import DegenerateMetric, DimensionMismatch, NoConvergence, SignatureMismatch
from .expr import ZERO, Chart, evaluate_array, is_zero, simplify
from .frames import NConnection, canonical_nconnection, hessian, symbolic_inverse


def _symmetric(M, k, label):
    M = to_array(M)
    if M.shape != (k, k):
        raise DimensionMismatch(f"{label} must be {k}x{k}, got {M.shape}")
    for i in range(k):
        for j in range(i + 1, k):
            if M[i, j] is not M[j, i]:
                if not is_zero(simplify(M[i, j] - M[j, i])):
                    raise ValueError(f"{label} is not symmetric at ({i}, {j})")
                M[j, i] = M[i, j]
    return M


@dataclass(frozen=True, eq=False)
class DMetric:
    """g = g_ij dx^i dx^j + h_ab e^a e^b with e^a = dy^a + N^a_i dx^i."""

    chart: Chart
    g: np.ndarray
    h: np.ndarray
    ncon: NConnection
    signature: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "g", _symmetric(self.g, self.chart.n, "g"))
        object.__setattr__(self, "h", _symmetric(self.h, self.chart.m, "h"))
        if self.ncon.chart != self.chart:
            raise DimensionMismatch("N-connection lives on a different chart")

    @cached_property
    def ginv(self):
        return symbolic_inverse(self.g)

    @cached_property
    def hinv(self):
        return symbolic_inverse(self.h)

    @cached_property
    def adapted(self):
        """Block-diagonal metric components in the adapted frame."""
        n, dim = self.chart.n, self.chart.dim
        G = zeros((dim, dim))
        G[:n, :n] = self.g
        G[n:, n:] = self.h
        return G

    @cached_property
    def adapted_inverse(self):
        n, dim = self.chart.n, self.chart.dim
        G = zeros((dim, dim))
        G[:n, :n] = self.ginv
        G[n:, n:] = self.hinv
        return G

    def is_identified_structurally(self):
        """g_ij and h_(i)(j) are the same expressions (n == m)."""
        if self.chart.n != self.chart.m:
            return False
        return all(self.g[i, j] is self.h[i, j] for i in range(self.chart.n) for j in range(self.chart.n))

    def identification_residual(self, points):
        """max |g_ij - h_(i)(j)| over points (inf when n != m)."""
        if self.chart.n != self.chart.m:
            return float("inf")
        if self.is_identified_structurally():
            return 0.0
        diff = evaluate_array(self.g, self.chart, points) - evaluate_array(self.h, self.chart, points)
        diff = diff[np.all(np.isfinite(diff.reshape(len(diff), -1)), axis=1)]
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def check_nondegenerate(self, points):
        from .frames import check_nondegenerate

        check_nondegenerate(self.g, self.chart, points)
        check_nondegenerate(self.h, self.chart, points)


def lagrange_dmetric(L, chart):
    """d-metric induced by a regular generating function: g_ij = h_(i)(j) = Hessian."""
    h = hessian(L, chart)
    _, ncon = canonical_nconnection(L, chart)
    return DMetric(chart, h, h.copy(), ncon)


def assemble_coordinate_metric(dm):
    """Coordinate components of the d-metric.

    [[g_ij + N^a_i N^b_j h_ab, N^e_i h_eb], [h_ae N^e_j, h_ab]]
    """
    chart = dm.chart
    n, m, dim = chart.n, chart.m, chart.dim
    N, g, h = dm.ncon.N, dm.g, dm.h
    # hN[b, i] = h_be N^e_i
    hN = zeros((m, n))
    for b in range(m):
        for i in range(n):
            s = ZERO
            for e in range(m):
                if not is_zero(N[e, i]) and not is_zero(h[b, e]):
                    s = s + h[b, e] * N[e, i]
            hN[b, i] = simplify(s)
    G = zeros((dim, dim))
    for i in range(n):
        for j in range(i, n):
            s = g[i, j]
            for a in range(m):
                if not is_zero(N[a, i]) and not is_zero(hN[a, j]):
                    s = s + N[a, i] * hN[a, j]
            G[i, j] = G[j, i] = simplify(s)
        for b in range(m):
            G[i, n + b] = G[n + b, i] = hN[b, i]
    G[n:, n:] = h
    return G


def split_coordinate_metric(G, chart):
    """Blocks (g, h, N) of a coordinate metric: N^e_j = h^eb G_jb, g = G_hh - N^T h N."""
    G = to_array(G)
    n, m, dim = chart.n, chart.m, chart.dim
    if G.shape != (dim, dim):
        raise DimensionMismatch(f"metric must be {dim}x{dim}, got {G.shape}")
    h = G[n:, n:].copy()
    hinv = symbolic_inverse(h)
    N = zeros((m, n))
    for e in range(m):
        for j in range(n):
            s = ZERO
            for b in range(m):
                if not is_zero(hinv[e, b]) and not is_zero(G[j, n + b]):
                    s = s + hinv[e, b] * G[j, n + b]
            N[e, j] = simplify(s)
    ncon = NConnection(chart, N)
    g = zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            s = G[i, j]
            for a in range(m):
                for b in range(m):
                    if not (is_zero(N[a, i]) or is_zero(N[b, j]) or is_zero(h[a, b])):
                        s = s - N[a, i] * N[b, j] * h[a, b]
            g[i, j] = g[j, i] = simplify(s)
    return g, h, ncon


def extract_nconnection(G, chart):
    """N^e_j = h^eb G_jb from the off-diagonal block of a coordinate metric."""
    return split_coordinate_metric(G, chart)[2]


def dmetric_from_coordinate(G, chart):
    g, h, ncon = split_coordinate_metric(G, chart)
    return DMetric(chart, g, h, ncon)


# -- pointwise frame matching --------------------------------------------------

@dataclass(frozen=True)
class Vierbein:
    """e[alpha', alpha] with g'_{a'b'} e^{a'}_a e^{b'}_b = g_ab at one point."""

    e: np.ndarray
    residual: float
    N_primed: np.ndarray | None = None
    gauge: str = "block-diagonal; symmetric positive blocks for definite signature"
    iterations: dict = field(default_factory=dict)


def _inertia(A, tol=1e-12):
    w = np.linalg.eigvalsh(A)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    if np.any(np.abs(w) <= tol * scale):
        raise DegenerateMetric("metric block is singular at the matching point")
    return int(np.sum(w > 0)), int(np.sum(w < 0))


def sqrtm_newton(A, tol=1e-14, max_iter=100):
    """Principal square root of an SPD matrix by the Denman-Beavers Newton iteration."""
    Y = np.array(A, dtype=float)
    Z = np.eye(len(Y))
    for it in range(1, max_iter + 1):
        Yn = 0.5 * (Y + np.linalg.inv(Z))
        Zn = 0.5 * (Z + np.linalg.inv(Y))
        delta = np.linalg.norm(Yn - Y, ord="fro") / max(np.linalg.norm(Yn, ord="fro"), 1e-300)
        Y, Z = Yn, Zn
        if delta < tol:
            return Y, it
    raise NoConvergence(f"matrix square root did not converge in {max_iter} iterations")


def _match_block(A, B):
    """Solve e^T A e = B for one symmetric block; returns (e, iterations)."""
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    if _inertia(A) != _inertia(B):
        raise SignatureMismatch(f"signatures differ: {_inertia(A)} vs {_inertia(B)}")
    if np.all(np.linalg.eigvalsh(A) < 0):
        A, B = -A, -B
    if np.all(np.linalg.eigvalsh(A) > 0):
        # symmetric positive solution e = A^-1/2 (A^1/2 B A^1/2)^1/2 A^-1/2
        rA, it1 = sqrtm_newton(A)
        rA_inv = np.linalg.inv(rA)
        M, it2 = sqrtm_newton(rA @ B @ rA)
        e = rA_inv @ M @ rA_inv
        return 0.5 * (e + e.T), it1 + it2
    # indefinite: congruence through the sign-normal forms of both blocks
    wa, Pa = np.linalg.eigh(A)
    wb, Pb = np.linalg.eigh(B)
    Qa = Pa / np.sqrt(np.abs(wa))
    Qb = Pb / np.sqrt(np.abs(wb))
    # eigh sorts ascending, so the sign patterns line up
    e = Qa @ np.linalg.inv(Qb)
    return e, 0


def frame_match_solve(target, source, point, tol=1e-9):
    """Pointwise vierbein relating a primed d-metric to ``source`` (both DMetric).

    The primed N-connection is induced as N'^{a'}_{i'} = e^{a'}_a N^a_i (e^-1)^i_{i'}.
    """
    chart = source.chart
    n = chart.n
    pt = np.atleast_2d(np.asarray(point, dtype=float))
    tg = evaluate_array(target.g, target.chart, pt)[0]
    th = evaluate_array(target.h, target.chart, pt)[0]
    sg = evaluate_array(source.g, chart, pt)[0]
    sh = evaluate_array(source.h, chart, pt)[0]
    eh, ith = _match_block(tg, sg)
    ev, itv = _match_block(th, sh)
    e = block_diag(eh, ev)
    Gt = block_diag(tg, th)
    Gs = block_diag(sg, sh)
    res = float(np.linalg.norm(e.T @ Gt @ e - Gs, ord="fro"))
    if not res < tol * max(1.0, float(np.linalg.norm(Gs, ord="fro"))):
        raise NoConvergence(f"frame matching residual {res:.3e} above tolerance")
    N = evaluate_array(source.ncon.N, chart, pt)[0]
    N_primed = ev @ N @ np.linalg.inv(eh)
    return Vierbein(e=e, residual=res, N_primed=N_primed, iterations={"h": ith, "v": itv, "n": n})


def warn_unless_identified(dm, points, tol=1e-10):
    if dm.identification_residual(points) > tol:
        warnings.warn("d-metric blocks are not identified (g_ij != h_(i)(j)); "
                      "the symplectic form is not the canonical closed one", stacklevel=3)
