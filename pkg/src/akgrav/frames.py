"""Nonlinear connections, adapted frames and anholonomy.

Index layout used throughout the package: a full frame index ``alpha`` runs
over ``0..n+m-1``; ``alpha < n`` is horizontal (``e_i``) and ``alpha = n + a``
is vertical (``e_a``).  Vertical indices ``a`` are stored 0-based; for the
2+2 chart ``a = 0`` displays as 3 and ``a = 1`` as 4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .arrays import all_zero, to_array, zeros
from .errors import DegenerateMetric, DimensionMismatch
from .expr import ONE, ZERO, Chart, as_expr, deriv, evaluate_array, is_zero, simplify


# -- matrices of expressions ---------------------------------------------------

def det(M):
    """Symbolic determinant by cofactor expansion (small matrices only)."""
    M = np.asarray(M, dtype=object)
    k = M.shape[0]
    if k == 1:
        return as_expr(M[0, 0])
    if k == 2:
        return simplify(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    total = ZERO
    for j in range(k):
        if is_zero(M[0, j]):
            continue
        minor = np.delete(np.delete(M, 0, axis=0), j, axis=1)
        sign = 1.0 if j % 2 == 0 else -1.0
        total = total + sign * M[0, j] * det(minor)
    return simplify(total)


def _is_diagonal(M):
    k = M.shape[0]
    return all(is_zero(M[i, j]) for i in range(k) for j in range(k) if i != j)


def symbolic_inverse(M):
    """Inverse of a square matrix of expressions via the cofactor formula.

    Diagonal matrices are inverted entrywise.  Raises DegenerateMetric when the
    determinant simplifies to the literal zero.
    """
    M = to_array(M)
    k = M.shape[0]
    if M.shape != (k, k):
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if _is_diagonal(M):
        if any(is_zero(M[i, i]) for i in range(k)):
            raise DegenerateMetric("diagonal entry is identically zero")
        out = zeros((k, k))
        for i in range(k):
            out[i, i] = simplify(ONE / M[i, i])
        return out
    d = det(M)
    if is_zero(d):
        raise DegenerateMetric("determinant is identically zero")
    inv_d = ONE / d
    if k == 1:
        return to_array([[inv_d]])
    out = zeros((k, k))
    for i in range(k):
        for j in range(k):
            minor = np.delete(np.delete(M, j, axis=0), i, axis=1)
            sign = 1.0 if (i + j) % 2 == 0 else -1.0
            cof = det(minor)
            if not is_zero(cof):
                out[i, j] = simplify(sign * cof * inv_d)
    return out


def _fmt_point(point):
    return tuple(float(v) for v in np.ravel(point))


def invert_matrix(M, chart, point, rel_tol=1e-12):
    """Numeric inverse of ``M`` evaluated at ``point``.

    Raises DegenerateMetric when |det| <= rel_tol * scale, with scale the
    k-th power of the largest entry.
    """
    A = evaluate_array(to_array(M), chart, point)[0]
    if not np.all(np.isfinite(A)):
        raise DegenerateMetric(f"matrix undefined at {_fmt_point(point)}")
    k = A.shape[0]
    scale = max(float(np.max(np.abs(A))), 1e-300) ** k
    d = np.linalg.det(A)
    if abs(d) <= rel_tol * scale:
        raise DegenerateMetric(f"singular matrix (det={d:.3e}) at {_fmt_point(point)}")
    return np.linalg.inv(A)


def check_nondegenerate(M, chart, points, rel_tol=1e-12):
    """Raise DegenerateMetric if ``M`` is singular at any of the points where it is defined."""
    vals = evaluate_array(to_array(M), chart, points)
    for A in vals:
        if not np.all(np.isfinite(A)):
            continue
        k = A.shape[0]
        scale = max(float(np.max(np.abs(A))), 1e-300) ** k
        if abs(np.linalg.det(A)) <= rel_tol * scale:
            raise DegenerateMetric("matrix is singular on the sample domain")


def hessian(L, chart):
    """h_ab = 1/2 d^2 L / dy^a dy^b (symmetric by construction)."""
    L = as_expr(L)
    m = chart.m
    h = zeros((m, m))
    for a in range(m):
        da = deriv(L, chart.v_names[a])
        for b in range(a, m):
            h[a, b] = h[b, a] = simplify(0.5 * deriv(da, chart.v_names[b]))
    return h


# -- N-connection ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NConnection:
    """Coefficients N^a_i stored as an m x n object array ``N[a, i]``."""

    chart: Chart
    N: np.ndarray

    def __post_init__(self):
        N = to_array(self.N)
        if N.shape != (self.chart.m, self.chart.n):
            raise DimensionMismatch(f"N must be {self.chart.m}x{self.chart.n}, got {N.shape}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "_cache", {})

    @classmethod
    def zero(cls, chart):
        return cls(chart, zeros((chart.m, chart.n)))

    @property
    def n(self):
        return self.chart.n

    @property
    def m(self):
        return self.chart.m

    @property
    def dim(self):
        return self.chart.dim

    def is_zero(self):
        return all_zero(self.N)

    def e(self, alpha, f):
        """Adapted derivative e_alpha(f), memoised per connection."""
        f = as_expr(f)
        key = (id(f), alpha)
        hit = self._cache.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        out = adapted_derivative(self, f, alpha)
        self._cache[key] = (f, out)
        return out

    def values(self, points):
        return evaluate_array(self.N, self.chart, points)


@dataclass(frozen=True, eq=False)
class SprayCoefficients:
    chart: Chart
    G: tuple


@dataclass(frozen=True, eq=False)
class AnholonomyCoefficients:
    """Structure functions: [e_alpha, e_beta] = w[gamma, alpha, beta] e_gamma."""

    ncon: NConnection
    w: np.ndarray = field(repr=False)

    @property
    def chart(self):
        return self.ncon.chart


def canonical_nconnection(L, chart):
    """Spray G^a and N-connection N^a_i = dG^a/dy^(i) induced by a regular L.

    G^a = 1/4 h^{a,(i)} ( d^2L/dy^(i)dx^k y^(k) - dL/dx^i ), where (i) is the
    vertical index paired with the horizontal index i.
    """
    if chart.n != chart.m:
        raise DimensionMismatch("the canonical N-connection needs n == m")
    L = as_expr(L)
    n = chart.n
    x, y = chart.h_names, chart.v_names
    hinv = symbolic_inverse(hessian(L, chart))
    bracket = []
    for i in range(n):
        dyi = deriv(L, y[i])
        term = -deriv(L, x[i])
        for k in range(n):
            term = term + deriv(dyi, x[k]) * chart.var(y[k])
        bracket.append(simplify(term))
    G = []
    for a in range(n):
        s = ZERO
        for i in range(n):
            if not is_zero(hinv[a, i]):
                s = s + hinv[a, i] * bracket[i]
        G.append(simplify(0.25 * s))
    N = zeros((n, n))
    for a in range(n):
        for i in range(n):
            N[a, i] = simplify(deriv(G[a], y[i]))
    return SprayCoefficients(chart, tuple(G)), NConnection(chart, N)


def adapted_derivative(ncon, f, slot):
    """e_i f = df/dx^i - N^a_i df/dy^a for horizontal slots, e_a f = df/dy^a otherwise."""
    chart = ncon.chart
    f = as_expr(f)
    if slot >= chart.n:
        return deriv(f, chart.v_names[slot - chart.n])
    out = deriv(f, chart.h_names[slot])
    for a in range(chart.m):
        Nai = ncon.N[a, slot]
        if is_zero(Nai):
            continue
        dfa = deriv(f, chart.v_names[a])
        if not is_zero(dfa):
            out = out - Nai * dfa
    return simplify(out)


def ncurvature(ncon):
    """Omega[a, i, j] from the coordinate expansion

    dN^a_i/dx^j - dN^a_j/dx^i + N^b_i dN^a_j/dy^b - N^b_j dN^a_i/dy^b.
    """
    chart = ncon.chart
    n, m = chart.n, chart.m
    N = ncon.N
    Om = zeros((m, n, n))
    for a in range(m):
        for i, j in itertools.combinations(range(n), 2):
            t = deriv(N[a, i], chart.h_names[j]) - deriv(N[a, j], chart.h_names[i])
            for b in range(m):
                yb = chart.v_names[b]
                t = t + N[b, i] * deriv(N[a, j], yb) - N[b, j] * deriv(N[a, i], yb)
            t = simplify(t)
            Om[a, i, j] = t
            Om[a, j, i] = simplify(-t)
    return Om


def ncurvature_frame_form(ncon):
    """Omega[a, i, j] = e_j(N^a_i) - e_i(N^a_j)."""
    n, m = ncon.n, ncon.m
    Om = zeros((m, n, n))
    for a in range(m):
        for i, j in itertools.combinations(range(n), 2):
            t = simplify(ncon.e(j, ncon.N[a, i]) - ncon.e(i, ncon.N[a, j]))
            Om[a, i, j] = t
            Om[a, j, i] = simplify(-t)
    return Om


def anholonomy(ncon, omega=None):
    """Structure functions of the adapted frame.

    Nonzero blocks: w^b_{i a} = -w^b_{a i} = dN^b_i/dy^a and w^a_{ij} = Omega^a_ij,
    so that [e_i, e_j] = Omega^a_ij e_a.
    """
    chart = ncon.chart
    n, m, dim = chart.n, chart.m, chart.dim
    Om = ncurvature(ncon) if omega is None else omega
    w = zeros((dim, dim, dim))
    for b in range(m):
        for i in range(n):
            for a in range(m):
                t = deriv(ncon.N[b, i], chart.v_names[a])
                if not is_zero(t):
                    w[n + b, i, n + a] = t
                    w[n + b, n + a, i] = simplify(-t)
        for i in range(n):
            for j in range(n):
                w[n + b, i, j] = Om[b, i, j]
    return AnholonomyCoefficients(ncon, w)


def commutator_residuals(anh):
    """[e_a, e_b] u - w^g_ab e_g(u) for every frame pair and coordinate function u.

    Returns an object array r[alpha, beta, mu]; the commutator side is built
    by composing adapted derivatives, independently of ``anh.w``.
    """
    ncon = anh.ncon
    chart = ncon.chart
    dim = chart.dim
    coords = [chart.var(name) for name in chart.names]
    first = [[ncon.e(a, u) for u in coords] for a in range(dim)]
    r = zeros((dim, dim, dim))
    for al in range(dim):
        for be in range(dim):
            for mu in range(dim):
                lhs = ncon.e(al, first[be][mu]) - ncon.e(be, first[al][mu])
                rhs = ZERO
                for g in range(dim):
                    if not is_zero(anh.w[g, al, be]):
                        rhs = rhs + anh.w[g, al, be] * first[g][mu]
                r[al, be, mu] = simplify(lhs - rhs)
    return r


def elongated_frame(ncon):
    """Matrices E, Einv with e_alpha = E[alpha, mu] d_mu and e^alpha = Einv[alpha, mu] du^mu.

    Both are unit-triangular in N, so no numeric inversion is involved.
    """
    n, m, dim = ncon.n, ncon.m, ncon.dim
    E = zeros((dim, dim))
    Einv = zeros((dim, dim))
    for mu in range(dim):
        E[mu, mu] = ONE
        Einv[mu, mu] = ONE
    for i in range(n):
        for a in range(m):
            if not is_zero(ncon.N[a, i]):
                E[i, n + a] = simplify(-ncon.N[a, i])
                Einv[n + a, i] = ncon.N[a, i]
    return E, Einv
