"""Almost complex and almost symplectic structures, forms in anholonomic frames."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .arrays import to_array, zeros
from .errors import DimensionMismatch
from .expr import ONE, ZERO, as_expr, deriv, is_zero, simplify
from .frames import elongated_frame

ADAPTED = "adapted"
COORDINATE = "coordinate"


@dataclass(frozen=True, eq=False)
class TensorField:
    """Dense components with per-slot typing.

    ``slots`` is a tuple of (block, variance) pairs, block in {"h", "v", "full"}
    and variance in {"up", "down"}.
    """

    components: np.ndarray
    slots: tuple
    frame: str = ADAPTED
    name: str = ""

    def __post_init__(self):
        comps = to_array(self.components)
        if comps.ndim != len(self.slots):
            raise DimensionMismatch(f"{comps.ndim} component axes for {len(self.slots)} slots")
        object.__setattr__(self, "components", comps)

    def __getitem__(self, idx):
        return self.components[idx]

    @property
    def shape(self):
        return self.components.shape


@dataclass(frozen=True, eq=False)
class DifferentialForm:
    """k-form stored as a fully antisymmetric (dim,)*k array of components."""

    degree: int
    components: np.ndarray
    frame: str = ADAPTED
    name: str = ""

    def __post_init__(self):
        comps = to_array(self.components)
        if comps.ndim != self.degree:
            raise DimensionMismatch(f"a {self.degree}-form needs {self.degree} component axes")
        object.__setattr__(self, "components", comps)

    def __getitem__(self, idx):
        return self.components[idx]

    @property
    def dim(self):
        return self.components.shape[0] if self.degree else 0


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def antisymmetric_from_sorted(values, dim, k):
    """Fill a full antisymmetric array from values on strictly increasing index tuples."""
    out = zeros((dim,) * k)
    for idx, v in values.items():
        if is_zero(v):
            continue
        neg = None
        for perm in itertools.permutations(range(k)):
            target = tuple(idx[p] for p in perm)
            if _perm_sign(perm) > 0:
                out[target] = v
            else:
                if neg is None:
                    neg = simplify(-v)
                out[target] = neg
    return out


def scalar_form(f, frame=ADAPTED):
    return DifferentialForm(0, np.array(as_expr(f), dtype=object), frame)


def almost_complex(ncon):
    """J e_i = -e_(i), J e_(i) = e_i; components J[gamma, alpha] = (J e_alpha)^gamma."""
    n, m = ncon.n, ncon.m
    if n != m:
        raise DimensionMismatch("the almost complex structure pairs e_i with e_(i): needs n == m")
    J = zeros((n + m, n + m))
    for i in range(n):
        J[n + i, i] = -ONE
        J[i, n + i] = ONE
    return TensorField(J, (("full", "up"), ("full", "down")), ADAPTED, "J")


def _matmul(A, B):
    r, k = A.shape
    c = B.shape[1]
    out = zeros((r, c))
    for i in range(r):
        for j in range(c):
            s = ZERO
            for t in range(k):
                if not is_zero(A[i, t]) and not is_zero(B[t, j]):
                    s = s + A[i, t] * B[t, j]
            out[i, j] = simplify(s)
    return out


def coordinate_endomorphism(T, ncon):
    """Coordinate components T^mu_nu of a (1,1) tensor given in the adapted frame.

    With d_mu = e_alpha (Einv)^alpha_mu... the vector e_alpha has coordinate
    components E[alpha, :], so T_coord = E^T T Einv.
    """
    E, Einv = elongated_frame(ncon)
    return _matmul(_matmul(E.T.copy(), T.components), Einv)


def symplectic_form(dm, J, points=None):
    """theta[alpha, beta] = g_{gamma beta} J^gamma_alpha, i.e. theta(X, Y) = g(JX, Y)."""
    if points is not None:
        from .metrics import warn_unless_identified

        warn_unless_identified(dm, points)
    elif not dm.is_identified_structurally():
        warnings.warn("symplectic form built from a d-metric that is not L-identified", stacklevel=2)
    G = dm.adapted
    dim = G.shape[0]
    th = zeros((dim, dim))
    for a in range(dim):
        for b in range(dim):
            s = ZERO
            for g in range(dim):
                if not is_zero(J.components[g, a]) and not is_zero(G[g, b]):
                    s = s + J.components[g, a] * G[g, b]
            th[a, b] = simplify(s)
    return DifferentialForm(2, th, ADAPTED, "theta")


def liouville_potential(L, chart):
    """omega = 1/2 dL/dy^(i) dx^i in the coordinate coframe."""
    if chart.n != chart.m:
        raise DimensionMismatch("the Liouville potential pairs x^i with y^(i): needs n == m")
    L = as_expr(L)
    comps = zeros((chart.dim,))
    for i in range(chart.n):
        comps[i] = simplify(0.5 * deriv(L, chart.v_names[i]))
    return DifferentialForm(1, comps, COORDINATE, "omega")


def to_adapted(form, ncon):
    """Coordinate-coframe components -> adapted components f(e_a0, ..., e_ak)."""
    if form.frame == ADAPTED:
        return form
    E, _ = elongated_frame(ncon)
    return DifferentialForm(form.degree, _transform(form.components, E), ADAPTED, form.name)


def to_coordinate(form, ncon):
    """Adapted components -> coordinate components f(d_mu0, ...)."""
    if form.frame == COORDINATE:
        return form
    _, Einv = elongated_frame(ncon)
    # d_mu = Einv[alpha, mu] e_alpha
    return DifferentialForm(form.degree, _transform(form.components, Einv.T.copy()), COORDINATE, form.name)


def _transform(comps, M):
    """out[a0..ak] = sum M[a0, m0] ... M[ak, mk] comps[m0..mk]."""
    out = comps
    k = comps.ndim
    dim = M.shape[0]
    for axis in range(k):
        new = zeros(out.shape)
        for idx in np.ndindex(out.shape):
            s = ZERO
            for mu in range(dim):
                if is_zero(M[idx[axis], mu]):
                    continue
                src = idx[:axis] + (mu,) + idx[axis + 1:]
                if not is_zero(out[src]):
                    s = s + M[idx[axis], mu] * out[src]
            new[idx] = simplify(s)
        out = new
    return out


def _frame_ops(form, anh, chart):
    if form.frame == COORDINATE:
        names = chart.names
        return (lambda alpha, f: deriv(f, names[alpha])), None
    if anh is None:
        raise ValueError("an adapted-frame form needs anholonomy coefficients")
    return anh.ncon.e, anh.w


def exterior_derivative(form, anh=None, chart=None):
    """Exterior derivative in the form's frame.

    (df)(X0..Xk) = sum_j (-1)^j X_j f(..^j..) + sum_{j<l} (-1)^(j+l) f([X_j, X_l], ..^j..^l..)
    with [e_a, e_b] = w^g_ab e_g; coordinate forms use w = 0.
    """
    if chart is None:
        if anh is None:
            raise ValueError("need a chart or anholonomy coefficients")
        chart = anh.chart
    dim = chart.dim
    e, w = _frame_ops(form, anh, chart)
    k = form.degree
    comps = form.components
    values = {}
    for idx in itertools.combinations(range(dim), k + 1):
        s = ZERO
        for j in range(k + 1):
            rest = idx[:j] + idx[j + 1:]
            f = comps[rest] if k else comps[()]
            if not is_zero(f):
                s = s + (-1.0) ** j * e(idx[j], f)
        if w is not None and k >= 1:
            for j, l in itertools.combinations(range(k + 1), 2):
                rest = tuple(idx[t] for t in range(k + 1) if t not in (j, l))
                for g in range(dim):
                    wg = w[g, idx[j], idx[l]]
                    if is_zero(wg):
                        continue
                    f = comps[(g,) + rest]
                    if not is_zero(f):
                        s = s + (-1.0) ** (j + l) * wg * f
        values[idx] = simplify(s)
    return DifferentialForm(k + 1, antisymmetric_from_sorted(values, dim, k + 1), form.frame)


def wedge(a, b):
    """(a ^ b) with the determinant normalisation: (e^1 ^ e^2)(e_1, e_2) = 1."""
    if a.frame != b.frame:
        raise ValueError("forms live in different frames")
    p, q = a.degree, b.degree
    if p == 0 or q == 0:
        s, f = (a, b) if p == 0 else (b, a)
        c = s.components[()]
        comps = f.components.copy()
        for idx in np.ndindex(comps.shape):
            comps[idx] = simplify(c * comps[idx])
        return DifferentialForm(f.degree, comps, f.frame)
    dim = a.dim
    k = p + q
    norm = 1.0 / (math.factorial(p) * math.factorial(q))
    values = {}
    for idx in itertools.combinations(range(dim), k):
        s = ZERO
        for perm in itertools.permutations(range(k)):
            sel = tuple(idx[t] for t in perm)
            x = a.components[sel[:p]]
            if is_zero(x):
                continue
            y = b.components[sel[p:]]
            if is_zero(y):
                continue
            s = s + (_perm_sign(perm) * norm) * x * y
        values[idx] = simplify(s)
    return DifferentialForm(k, antisymmetric_from_sorted(values, dim, k), a.frame)


def coframe_form(alpha, dim, frame=ADAPTED):
    comps = zeros((dim,))
    comps[alpha] = ONE
    return DifferentialForm(1, comps, frame)


# -- Neijenhuis tensor -----------------------------------------------------------

def neijenhuis(J, anh):
    """Components N[gamma, alpha, beta] of
    -[e_a, e_b] + [J e_a, J e_b] - J[J e_a, e_b] - J[e_a, J e_b]
    in the adapted basis, expanded with the structure functions w.

    J is constant in the adapted frame, so every bracket reduces to w terms.
    """
    Jc = J.components
    w = anh.w
    dim = Jc.shape[0]

    def bracket(X, Y):
        # [X^a e_a, Y^b e_b] for constant components
        out = [ZERO] * dim
        for a in range(dim):
            if is_zero(X[a]):
                continue
            for b in range(dim):
                if is_zero(Y[b]):
                    continue
                for g in range(dim):
                    if not is_zero(w[g, a, b]):
                        out[g] = out[g] + X[a] * Y[b] * w[g, a, b]
        return out

    def apply_J(V):
        return [simplify(sum((Jc[g, a] * V[a] for a in range(dim) if not is_zero(Jc[g, a])), ZERO))
                for g in range(dim)]

    basis = [[ONE if t == a else ZERO for t in range(dim)] for a in range(dim)]
    Jb = [apply_J(v) for v in basis]
    out = zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            t1 = bracket(basis[a], basis[b])
            t2 = bracket(Jb[a], Jb[b])
            t3 = apply_J(bracket(Jb[a], basis[b]))
            t4 = apply_J(bracket(basis[a], Jb[b]))
            for g in range(dim):
                out[g, a, b] = simplify(-t1[g] + t2[g] - t3[g] - t4[g])
    return TensorField(out, (("full", "up"), ("full", "down"), ("full", "down")), ADAPTED, "Neijenhuis")


def lie_bracket(X, Y, chart):
    """Coordinate Lie bracket of vector fields given by coordinate components."""
    names = chart.names
    dim = chart.dim
    out = []
    for mu in range(dim):
        s = ZERO
        for nu in range(dim):
            if not is_zero(X[nu]):
                s = s + X[nu] * deriv(Y[mu], names[nu])
            if not is_zero(Y[nu]):
                s = s - Y[nu] * deriv(X[mu], names[nu])
        out.append(simplify(s))
    return out


def neijenhuis_coordinate_oracle(ncon):
    """Neijenhuis tensor evaluated with coordinate Lie brackets and returned in the adapted basis.

    Independent of the structure functions: each e_alpha is the coordinate
    vector E[alpha, :], J acts through its coordinate matrix.
    """
    chart = ncon.chart
    dim = chart.dim
    E, Einv = elongated_frame(ncon)
    Jcoord = coordinate_endomorphism(almost_complex(ncon), ncon)

    def apply_J(V):
        return [simplify(sum((Jcoord[mu, nu] * V[nu] for nu in range(dim) if not is_zero(Jcoord[mu, nu])), ZERO))
                for mu in range(dim)]

    vecs = [list(E[a, :]) for a in range(dim)]
    Jv = [apply_J(v) for v in vecs]
    out = zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            t1 = lie_bracket(vecs[a], vecs[b], chart)
            t2 = lie_bracket(Jv[a], Jv[b], chart)
            t3 = apply_J(lie_bracket(Jv[a], vecs[b], chart))
            t4 = apply_J(lie_bracket(vecs[a], Jv[b], chart))
            coord = [-t1[mu] + t2[mu] - t3[mu] - t4[mu] for mu in range(dim)]
            for g in range(dim):
                s = ZERO
                for mu in range(dim):
                    if not is_zero(Einv[g, mu]) and not is_zero(coord[mu]):
                        s = s + Einv[g, mu] * coord[mu]
                out[g, a, b] = simplify(s)
    return out
