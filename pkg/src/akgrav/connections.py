"""d-connections, the Levi-Civita connection, distortion and torsion.

Full-array convention: ``Gamma[g, a, b]`` is the component of D_{e_b} e_a
along e_g, so L^i_jk = Gamma[i, j, k] (direction k) and C^i_jc = Gamma[i, j, n+c].
Torsion follows the sign used for the d-connection torsion blocks:
T[g, a, b] = Gamma[g, a, b] - Gamma[g, b, a] + w[g, a, b], which is minus the
usual T(e_a, e_b).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .arrays import residual_stats, sub, to_array, zeros
from .errors import DimensionMismatch, IdentificationViolated
from .expr import ONE, ZERO, Chart, deriv, is_zero, simplify
from .frames import elongated_frame, ncurvature, symbolic_inverse

NORMAL = "normal"
CANONICAL = "canonical"


def _sum(terms):
    s = ZERO
    for t in terms:
        s = s + t
    return simplify(s)


@dataclass(frozen=True, eq=False)
class DConnection:
    """Adapted coefficients Lh[i,j,k], Lv[a,b,k], Ch[i,j,c], Cv[a,b,c]."""

    chart: Chart
    Lh: np.ndarray
    Lv: np.ndarray
    Ch: np.ndarray
    Cv: np.ndarray
    label: str = ""

    def __post_init__(self):
        n, m = self.chart.n, self.chart.m
        shapes = {"Lh": (n, n, n), "Lv": (m, m, n), "Ch": (n, n, m), "Cv": (m, m, m)}
        for name, shape in shapes.items():
            arr = to_array(getattr(self, name))
            if arr.shape != shape:
                raise DimensionMismatch(f"{name} must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, name, arr)

    @cached_property
    def full(self):
        n, dim = self.chart.n, self.chart.dim
        G = zeros((dim, dim, dim))
        G[:n, :n, :n] = self.Lh
        G[n:, n:, :n] = self.Lv
        G[:n, :n, n:] = self.Ch
        G[n:, n:, n:] = self.Cv
        return G

    def perturbed(self, block, index, delta):
        """Copy with one coefficient shifted by ``delta`` (negative controls)."""
        arrs = {k: getattr(self, k).copy() for k in ("Lh", "Lv", "Ch", "Cv")}
        arrs[block][index] = simplify(arrs[block][index] + delta)
        return DConnection(self.chart, label=self.label + "+perturbed", **arrs)


def _h_christoffel(dm, e):
    """1/2 g^ih (e_k g_jh + e_j g_hk - e_h g_jk) with the adapted derivative e."""
    n = dm.chart.n
    g, ginv = dm.g, dm.ginv
    dg = [[[e(k, g[i, j]) for k in range(n)] for j in range(n)] for i in range(n)]
    L = zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                s = ZERO
                for h in range(n):
                    if is_zero(ginv[i, h]):
                        continue
                    t = dg[j][h][k] + dg[h][k][j] - dg[j][k][h]
                    if not is_zero(t):
                        s = s + ginv[i, h] * t
                L[i, j, k] = L[i, k, j] = simplify(0.5 * s)
    return L


def _v_christoffel(M, Minv, names):
    """1/2 M^ad (d_c M_bd + d_b M_cd - d_d M_bc) in the given coordinates."""
    k = M.shape[0]
    C = zeros((k, k, k))
    dM = [[[deriv(M[a, b], names[c]) for c in range(k)] for b in range(k)] for a in range(k)]
    for a in range(k):
        for b in range(k):
            for c in range(b, k):
                s = ZERO
                for d in range(k):
                    if is_zero(Minv[a, d]):
                        continue
                    t = dM[b][d][c] + dM[c][d][b] - dM[b][c][d]
                    if not is_zero(t):
                        s = s + Minv[a, d] * t
                C[a, b, c] = C[a, c, b] = simplify(0.5 * s)
    return C


def check_identification(dm, points=None, tol=1e-10):
    if dm.chart.n != dm.chart.m:
        raise IdentificationViolated("identification needs n == m")
    if dm.is_identified_structurally():
        return 0.0
    if points is None:
        for i in range(dm.chart.n):
            for j in range(dm.chart.n):
                if not is_zero(simplify(dm.g[i, j] - dm.h[i, j])):
                    raise IdentificationViolated(f"g[{i},{j}] differs from h[{i},{j}]")
        return 0.0
    r = dm.identification_residual(points)
    if r > tol:
        raise IdentificationViolated(f"max |g_ij - h_(i)(j)| = {r:.3e} on the samples")
    return r


def normal_dconnection(dm, points=None):
    """Normal d-connection of an identified d-metric (g_ij = h_(i)(j)).

    L^i_jk = 1/2 g^ih (e_k g_jh + e_j g_hk - e_h g_jk),
    C^i_jk = 1/2 g^ih (dg_jh/dy^k + dg_hk/dy^j - dg_jk/dy^h),
    with the v-blocks copied from the h-blocks.
    """
    check_identification(dm, points)
    chart = dm.chart
    ncon = dm.ncon
    Lh = _h_christoffel(dm, ncon.e)
    Ch = _v_christoffel(dm.g, dm.ginv, chart.v_names)
    return DConnection(chart, Lh, Lh.copy(), Ch, Ch.copy(), NORMAL)


def canonical_dconnection(dm):
    """Metric-compatible d-connection with vanishing pure h- and v-torsion.

    Used for d-metrics without the g <-> h identification:
    L^i_jk as above, L^a_bk = e_b N^a_k + 1/2 h^ac (e_k h_bc - h_dc e_b N^d_k - h_db e_c N^d_k),
    C^i_jc = 1/2 g^ik dg_jk/dy^c, C^a_bc = 1/2 h^ad (e_c h_bd + e_b h_cd - e_d h_bc).
    """
    chart = dm.chart
    n, m = chart.n, chart.m
    ncon = dm.ncon
    g, h, ginv, hinv = dm.g, dm.h, dm.ginv, dm.hinv
    N = ncon.N
    y = chart.v_names
    dN = [[[deriv(N[a, k], y[b]) for b in range(m)] for k in range(n)] for a in range(m)]
    Lh = _h_christoffel(dm, ncon.e)
    Lv = zeros((m, m, n))
    for a in range(m):
        for b in range(m):
            for k in range(n):
                s = ZERO
                for c in range(m):
                    if is_zero(hinv[a, c]):
                        continue
                    t = ncon.e(k, h[b, c])
                    for d in range(m):
                        t = t - h[d, c] * dN[d][k][b] - h[d, b] * dN[d][k][c]
                    t = simplify(t)
                    if not is_zero(t):
                        s = s + hinv[a, c] * t
                Lv[a, b, k] = simplify(dN[a][k][b] + 0.5 * s)
    Ch = zeros((n, n, m))
    for i in range(n):
        for j in range(n):
            for c in range(m):
                Ch[i, j, c] = _sum(ginv[i, k] * deriv(g[j, k], y[c]) for k in range(n)
                                   if not is_zero(ginv[i, k])) * 0.5
                Ch[i, j, c] = simplify(Ch[i, j, c])
    Cv = _v_christoffel(h, hinv, y)
    return DConnection(chart, Lh, Lv, Ch, Cv, CANONICAL)


def dconnection_for(dm, points=None, tol=1e-10):
    """Normal d-connection when the blocks are identified, canonical otherwise."""
    try:
        return normal_dconnection(dm, points)
    except IdentificationViolated:
        return canonical_dconnection(dm)


# -- Levi-Civita -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChristoffelField:
    """Coordinate Christoffel symbols Gamma[a, b, c], symmetric in (b, c)."""

    chart: Chart
    G: np.ndarray
    metric: np.ndarray
    metric_inverse: np.ndarray


def levi_civita(Gfull, chart):
    G = to_array(Gfull)
    if G.shape != (chart.dim, chart.dim):
        raise DimensionMismatch(f"metric must be {chart.dim}x{chart.dim}")
    Ginv = symbolic_inverse(G)
    return ChristoffelField(chart, _v_christoffel(G, Ginv, chart.names), G, Ginv)


def metric_derivative_residual(lc):
    """nabla_c g_ab in coordinates (vanishes for the Levi-Civita connection)."""
    chart = lc.chart
    dim = chart.dim
    G, Gam = lc.metric, lc.G
    out = zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                s = deriv(G[a, b], chart.names[c])
                for t in range(dim):
                    if not is_zero(Gam[t, a, c]):
                        s = s - Gam[t, a, c] * G[t, b]
                    if not is_zero(Gam[t, b, c]):
                        s = s - Gam[t, b, c] * G[a, t]
                out[a, b, c] = simplify(s)
    return out


def lc_in_adapted_frame(lc, ncon):
    """Adapted components (nabla_{e_b} e_a)^g of the Levi-Civita connection.

    e_a = E[a, mu] d_mu, so nabla_{e_b} e_a = E[b, nu] (d_nu E[a, mu] + E[a, l] Gamma^mu_{l nu}) d_mu,
    and the coframe Einv projects onto e_g.
    """
    chart = lc.chart
    dim = chart.dim
    E, Einv = elongated_frame(ncon)
    names = chart.names
    Gam = lc.G
    # V[a, b, mu]: coordinate components of nabla_{e_b} e_a
    out = zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            V = []
            for mu in range(dim):
                s = ZERO
                for nu in range(dim):
                    if is_zero(E[b, nu]):
                        continue
                    inner = deriv(E[a, mu], names[nu])
                    for l in range(dim):
                        if not is_zero(E[a, l]) and not is_zero(Gam[mu, l, nu]):
                            inner = inner + E[a, l] * Gam[mu, l, nu]
                    if not is_zero(inner):
                        s = s + E[b, nu] * inner
                V.append(simplify(s))
            for g in range(dim):
                out[g, a, b] = _sum(Einv[g, mu] * V[mu] for mu in range(dim)
                                    if not is_zero(Einv[g, mu]) and not is_zero(V[mu]))
    return out


# -- distortion ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DistortionIntermediates:
    Xi_h: np.ndarray
    Xi_v_plus: np.ndarray
    Xi_v_minus: np.ndarray
    L_ring: np.ndarray


def distortion_intermediates(dm, dc):
    chart = dm.chart
    n, m = chart.n, chart.m
    g, ginv, h, hinv = dm.g, dm.ginv, dm.h, dm.hinv
    Xi = zeros((n, n, n, n))
    Xi_plus_h = zeros((n, n, n, n))
    for i in range(n):
        for hh in range(n):
            for j in range(n):
                for k in range(n):
                    d = ONE if (i == j and hh == k) else ZERO
                    Xi[i, hh, j, k] = simplify(0.5 * (d - g[j, k] * ginv[i, hh]))
                    Xi_plus_h[i, hh, j, k] = simplify(0.5 * (d + g[j, k] * ginv[i, hh]))
    Xp = zeros((m, m, m, m))
    Xm = zeros((m, m, m, m))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    delta = ONE if (a == c and b == d) else ZERO
                    Xp[a, b, c, d] = simplify(0.5 * (delta + h[c, d] * hinv[a, b]))
                    Xm[a, b, c, d] = simplify(0.5 * (delta - h[c, d] * hinv[a, b]))
    Lr = zeros((m, m, n))
    for c in range(m):
        for a in range(m):
            for j in range(n):
                Lr[c, a, j] = simplify(dc.Lv[c, a, j] - deriv(dm.ncon.N[c, j], chart.v_names[a]))
    out = DistortionIntermediates(Xi, Xp, Xm, Lr)
    object.__setattr__(out, "Xi_h_plus", Xi_plus_h)
    return out


def distortion(dm, dc, omega=None):
    """Distortion Z with nabla = D + Z, from the block formulas

    Z^a_jk = -1/2 h^ab (C^i_jb g_ik + C^i_kb g_ij) - 1/2 Omega^a_jk
    Z^i_(b)k = 1/2 Omega^c_hk h_cb g^hi + +Xi^ih_jk C^j_hb       (vector e_b, direction e_k)
    Z^i_k(b) = 1/2 Omega^c_hk h_cb g^hi - Xi^ih_jk C^j_hb        (vector e_k, direction e_b)
    Z^a_(b)k = -(-Xi)^ad_cb oL^c_dk
    Z^a_k(b) = (+Xi)^ad_cb oL^c_dk
    Z^i_ab = -1/2 g^ij (oL^c_aj h_cb + oL^c_bj h_ca)
    Z^i_jk = Z^a_bc = 0
    """
    chart = dm.chart
    n, m, dim = chart.n, chart.m, chart.dim
    g, ginv, h, hinv = dm.g, dm.ginv, dm.h, dm.hinv
    Om = ncurvature(dm.ncon) if omega is None else omega
    C = dc.Ch
    X = distortion_intermediates(dm, dc)
    Xi, Xip, Xvp, Xvm, Lr = X.Xi_h, X.Xi_h_plus, X.Xi_v_plus, X.Xi_v_minus, X.L_ring
    Z = zeros((dim, dim, dim))
    for a in range(m):
        for j in range(n):
            for k in range(n):
                s = ZERO
                for b in range(m):
                    if is_zero(hinv[a, b]):
                        continue
                    t = _sum(C[i, j, b] * g[i, k] + C[i, k, b] * g[i, j] for i in range(n))
                    if not is_zero(t):
                        s = s + hinv[a, b] * t
                Z[n + a, j, k] = simplify(-0.5 * s - 0.5 * Om[a, j, k])
    for i in range(n):
        for b in range(m):
            for k in range(n):
                om_part = _sum(Om[c, hh, k] * h[c, b] * ginv[hh, i]
                               for c in range(m) for hh in range(n)
                               if not (is_zero(Om[c, hh, k]) or is_zero(h[c, b]) or is_zero(ginv[hh, i])))
                c_plus = _sum(Xip[i, hh, j, k] * C[j, hh, b] for j in range(n) for hh in range(n)
                              if not (is_zero(Xip[i, hh, j, k]) or is_zero(C[j, hh, b])))
                c_minus = _sum(Xi[i, hh, j, k] * C[j, hh, b] for j in range(n) for hh in range(n)
                               if not (is_zero(Xi[i, hh, j, k]) or is_zero(C[j, hh, b])))
                Z[i, n + b, k] = simplify(0.5 * om_part + c_plus)
                Z[i, k, n + b] = simplify(0.5 * om_part - c_minus)
    for a in range(m):
        for b in range(m):
            for k in range(n):
                minus = _sum(Xvm[a, d, c, b] * Lr[c, d, k] for c in range(m) for d in range(m)
                             if not (is_zero(Xvm[a, d, c, b]) or is_zero(Lr[c, d, k])))
                plus = _sum(Xvp[a, d, c, b] * Lr[c, d, k] for c in range(m) for d in range(m)
                            if not (is_zero(Xvp[a, d, c, b]) or is_zero(Lr[c, d, k])))
                Z[n + a, n + b, k] = simplify(-minus)
                Z[n + a, k, n + b] = plus
    for i in range(n):
        for a in range(m):
            for b in range(m):
                s = ZERO
                for j in range(n):
                    if is_zero(ginv[i, j]):
                        continue
                    t = _sum(Lr[c, a, j] * h[c, b] + Lr[c, b, j] * h[c, a] for c in range(m))
                    if not is_zero(t):
                        s = s + ginv[i, j] * t
                Z[i, n + a, n + b] = simplify(-0.5 * s)
    return Z


def reconcile_deflc(lc, dc, Z, ncon, points, adapted_lc=None):
    """Max |nabla - (D + Z)| in the adapted frame; returns (max, evaluated, skipped)."""
    plus = lc_in_adapted_frame(lc, ncon) if adapted_lc is None else adapted_lc
    dim = lc.chart.dim
    diff = zeros((dim, dim, dim))
    full = dc.full
    for idx in np.ndindex(diff.shape):
        diff[idx] = simplify(plus[idx] - full[idx] - Z[idx])
    return residual_stats([diff], lc.chart, points)


# -- torsion ----------------------------------------------------------------------------

def torsion(dc, anh):
    """Full torsion array T[g, a, b] = Gamma[g, a, b] - Gamma[g, b, a] + w[g, a, b]."""
    G = dc.full
    w = anh.w
    dim = G.shape[0]
    T = zeros((dim, dim, dim))
    for g in range(dim):
        for a in range(dim):
            for b in range(a + 1, dim):
                t = simplify(G[g, a, b] - G[g, b, a] + w[g, a, b])
                T[g, a, b] = t
                T[g, b, a] = simplify(-t)
    return T


def torsion_blocks(dc, ncon, omega=None):
    """Block formulas: T^i_jc = C^i_jc, T^a_ij = Omega^a_ij, T^a_ib = e_b N^a_i - L^a_bi,
    T^i_jk = T^a_bc = 0."""
    chart = dc.chart
    n, m, dim = chart.n, chart.m, chart.dim
    Om = ncurvature(ncon) if omega is None else omega
    T = zeros((dim, dim, dim))
    for i in range(n):
        for j in range(n):
            for c in range(m):
                T[i, j, n + c] = dc.Ch[i, j, c]
                T[i, n + c, j] = simplify(-dc.Ch[i, j, c])
    for a in range(m):
        for i in range(n):
            for j in range(n):
                T[n + a, i, j] = Om[a, i, j]
            for b in range(m):
                t = simplify(ncon.e(n + b, ncon.N[a, i]) - dc.Lv[a, b, i])
                T[n + a, i, n + b] = t
                T[n + a, n + b, i] = simplify(-t)
    return T


def cartan_torsion(dc, anh):
    """Torsion 2-forms from the first structure equation, -(de^g + Gamma^g_s ^ e^s).

    Built from the exterior derivative and wedge product of forms, independently
    of the component definition in ``torsion``.
    """
    from .almost_kahler import ADAPTED, DifferentialForm, coframe_form, exterior_derivative, wedge

    dim = anh.chart.dim
    G = dc.full
    out = zeros((dim, dim, dim))
    cof = [coframe_form(s, dim) for s in range(dim)]
    for g in range(dim):
        total = exterior_derivative(cof[g], anh).components.copy()
        for s in range(dim):
            conn = DifferentialForm(1, G[g, s, :].copy(), ADAPTED)
            if all(is_zero(x) for x in conn.components):
                continue
            wc = wedge(conn, cof[s]).components
            for idx in np.ndindex(total.shape):
                if not is_zero(wc[idx]):
                    total[idx] = total[idx] + wc[idx]
        for idx in np.ndindex(total.shape):
            out[(g,) + idx] = simplify(-total[idx])
    return out


# -- compatibility ----------------------------------------------------------------------

def covariant_derivative_2(dc, ncon, T2):
    """D_c T_ab = e_c T_ab - Gamma^s_ac T_sb - Gamma^s_bc T_as for an adapted (0,2) array."""
    G = dc.full
    dim = G.shape[0]
    out = zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                s = ncon.e(c, T2[a, b])
                for t in range(dim):
                    if not is_zero(G[t, a, c]) and not is_zero(T2[t, b]):
                        s = s - G[t, a, c] * T2[t, b]
                    if not is_zero(G[t, b, c]) and not is_zero(T2[a, t]):
                        s = s - G[t, b, c] * T2[a, t]
                out[a, b, c] = simplify(s)
    return out


def compatibility_residuals(dm, dc, theta, points):
    """{'Dg': stats, 'Dtheta': stats} with stats = (max, evaluated, skipped)."""
    Dg = covariant_derivative_2(dc, dm.ncon, dm.adapted)
    out = {"Dg": residual_stats([Dg], dm.chart, points)}
    if theta is not None:
        Dt = covariant_derivative_2(dc, dm.ncon, theta.components)
        out["Dtheta"] = residual_stats([Dt], dm.chart, points)
    return out


def generic_contorsion(dm, T):
    """Z from the torsion alone, valid for any metric-compatible connection.

    An independent route to the distortion: Levi-Civita = D - K with K the
    contorsion of the standard torsion -T (this module's T has the opposite sign).
    """
    G = dm.adapted
    Ginv = dm.adapted_inverse
    dim = G.shape[0]
    # lowered standard torsion Ts[l, a, b] = g_{l g} (-T[g, a, b])
    Ts = zeros((dim, dim, dim))
    for l in range(dim):
        for a in range(dim):
            for b in range(dim):
                Ts[l, a, b] = _sum(-G[l, g] * T[g, a, b] for g in range(dim)
                                   if not (is_zero(G[l, g]) or is_zero(T[g, a, b])))
    # nabla_X Y = D_X Y - K(X, Y); g(K(X,Y),W) = 1/2 [g(T(X,Y),W) - g(T(Y,W),X) + g(T(W,X),Y)]
    Z = zeros((dim, dim, dim))
    for g in range(dim):
        for a in range(dim):
            for b in range(dim):
                # X = e_b (direction), Y = e_a (vector)
                s = ZERO
                for w in range(dim):
                    if is_zero(Ginv[g, w]):
                        continue
                    k = 0.5 * (Ts[w, b, a] - Ts[b, a, w] + Ts[a, w, b])
                    if not is_zero(k):
                        s = s + Ginv[g, w] * k
                Z[g, a, b] = simplify(-s)
    return Z
