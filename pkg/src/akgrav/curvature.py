"""Curvature of d-connections, Ricci and scalar curvature, Levi-Civita oracle, Einstein residuals.

d-connection curvature is stored as R[a, b, g, d] = [R(e_d, e_g) e_b]^a, i.e.

    R^a_bgd = e_d G^a_bg - e_g G^a_bd + G^t_bg G^a_td - G^t_bd G^a_tg - w^t_dg G^a_bt

so that R^i_hjk, P^i_jka = R[i, j, k, n+a] and S^a_bcd match the usual block
names, and Ricci_bg = R^a_bga.  The coordinate Levi-Civita Riemann tensor uses
the textbook layout Rc[r, s, m, n] = [R(d_m, d_n) d_s]^r; both give the same Ricci.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .almost_kahler import ADAPTED, COORDINATE, DifferentialForm, TensorField, exterior_derivative, wedge
from .arrays import residual_stats, sub, to_array, zeros
from .expr import ZERO, deriv, is_zero, simplify
from .frames import ncurvature


def _sum(terms):
    s = ZERO
    for t in terms:
        s = s + t
    return simplify(s)


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    full: np.ndarray
    n: int

    @property
    def Rhhh(self):
        n = self.n
        return self.full[:n, :n, :n, :n]

    @property
    def Phva(self):
        n = self.n
        return self.full[:n, :n, :n, n:]

    @property
    def Svvv(self):
        n = self.n
        return self.full[n:, n:, n:, n:]


def curvature_from_coefficients(Gam, w, e):
    """Full curvature array of the connection with coefficients Gam[g, a, b]."""
    dim = Gam.shape[0]
    R = zeros((dim, dim, dim, dim))
    nz = [[[not is_zero(Gam[g, a, b]) for b in range(dim)] for a in range(dim)] for g in range(dim)]
    for a in range(dim):
        for b in range(dim):
            for g in range(dim):
                for d in range(g + 1, dim):
                    s = ZERO
                    if nz[a][b][g]:
                        s = s + e(d, Gam[a, b, g])
                    if nz[a][b][d]:
                        s = s - e(g, Gam[a, b, d])
                    for t in range(dim):
                        if nz[t][b][g] and nz[a][t][d]:
                            s = s + Gam[t, b, g] * Gam[a, t, d]
                        if nz[t][b][d] and nz[a][t][g]:
                            s = s - Gam[t, b, d] * Gam[a, t, g]
                        if nz[a][b][t] and not is_zero(w[t, d, g]):
                            s = s - w[t, d, g] * Gam[a, b, t]
                    s = simplify(s)
                    R[a, b, g, d] = s
                    R[a, b, d, g] = simplify(-s)
    return R


def dcurvature(dc, anh):
    return CurvatureBundle(curvature_from_coefficients(dc.full, anh.w, anh.ncon.e), dc.chart.n)


def dcurvature_blocks(dc, ncon, omega=None):
    """Block formulas for R^i_hjk, P^i_jka and S^a_bcd.

    R^i_hjk = e_k L^i_hj - e_j L^i_hk + L^m_hj L^i_mk - L^m_hk L^i_mj - C^i_ha Omega^a_kj
    P^i_jka = e_a L^i_jk - D_k C^i_ja
    S^a_bcd = e_d C^a_bc - e_c C^a_bd + C^e_bc C^a_ed - C^e_bd C^a_ec
    with D_k C^i_ja = e_k C^i_ja + L^i_mk C^m_ja - L^m_jk C^i_ma - L^c_ak C^i_jc.
    """
    n, m = dc.chart.n, dc.chart.m
    Om = ncurvature(ncon) if omega is None else omega
    L, Lv, C, Cv = dc.Lh, dc.Lv, dc.Ch, dc.Cv
    e = ncon.e
    R = zeros((n, n, n, n))
    for i in range(n):
        for hh in range(n):
            for j in range(n):
                for k in range(n):
                    s = e(k, L[i, hh, j]) - e(j, L[i, hh, k])
                    for mm in range(n):
                        s = s + L[mm, hh, j] * L[i, mm, k] - L[mm, hh, k] * L[i, mm, j]
                    for a in range(m):
                        if not is_zero(Om[a, k, j]):
                            s = s - C[i, hh, a] * Om[a, k, j]
                    R[i, hh, j, k] = simplify(s)
    P = zeros((n, n, n, m))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for a in range(m):
                    DC = e(k, C[i, j, a])
                    for mm in range(n):
                        DC = DC + L[i, mm, k] * C[mm, j, a] - L[mm, j, k] * C[i, mm, a]
                    for c in range(m):
                        DC = DC - Lv[c, a, k] * C[i, j, c]
                    P[i, j, k, a] = simplify(e(n + a, L[i, j, k]) - DC)
    S = zeros((m, m, m, m))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    s = e(n + d, Cv[a, b, c]) - e(n + c, Cv[a, b, d])
                    for ee in range(m):
                        s = s + Cv[ee, b, c] * Cv[a, ee, d] - Cv[ee, b, d] * Cv[a, ee, c]
                    S[a, b, c, d] = simplify(s)
    return R, P, S


def cartan_curvature(dc, anh):
    """Curvature 2-form components -(dG^a_b + G^a_t ^ G^t_b) from the second structure equation."""
    G = dc.full
    dim = G.shape[0]
    forms = [[DifferentialForm(1, G[a, b, :].copy(), ADAPTED) for b in range(dim)] for a in range(dim)]
    nonzero = [[not all(is_zero(x) for x in G[a, b, :]) for b in range(dim)] for a in range(dim)]
    out = zeros((dim, dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            total = zeros((dim, dim))
            if nonzero[a][b]:
                total = exterior_derivative(forms[a][b], anh).components.copy()
            for t in range(dim):
                if nonzero[a][t] and nonzero[t][b]:
                    wc = wedge(forms[a][t], forms[t][b]).components
                    for idx in np.ndindex(total.shape):
                        if not is_zero(wc[idx]):
                            total[idx] = total[idx] + wc[idx]
            for idx in np.ndindex(total.shape):
                out[(a, b) + idx] = simplify(-total[idx])
    return out


def dricci(cb):
    """Ricci_bg = R^a_bga over the full array (not symmetric in general)."""
    R = cb.full if isinstance(cb, CurvatureBundle) else cb
    dim = R.shape[0]
    Ric = zeros((dim, dim))
    for b in range(dim):
        for g in range(dim):
            Ric[b, g] = _sum(R[a, b, g, a] for a in range(dim) if not is_zero(R[a, b, g, a]))
    return TensorField(Ric, (("full", "down"), ("full", "down")), ADAPTED, "Ricci")


def dscalar(dm, ricci):
    """g^ij R_ij + h^ab R_ab."""
    Ric = ricci.components if isinstance(ricci, TensorField) else ricci
    Ginv = dm.adapted_inverse
    dim = Ginv.shape[0]
    return _sum(Ginv[a, b] * Ric[a, b] for a in range(dim) for b in range(dim)
                if not (is_zero(Ginv[a, b]) or is_zero(Ric[a, b])))


# -- Levi-Civita oracle --------------------------------------------------------------

def lc_riemann(lc):
    """Rc[r, s, m, n] = d_m G^r_ns - d_n G^r_ms + G^r_ml G^l_ns - G^r_nl G^l_ms."""
    chart = lc.chart
    names = chart.names
    Gam = lc.G
    dim = chart.dim
    R = zeros((dim, dim, dim, dim))
    for r in range(dim):
        for s in range(dim):
            for mu in range(dim):
                for nu in range(mu + 1, dim):
                    t = deriv(Gam[r, nu, s], names[mu]) - deriv(Gam[r, mu, s], names[nu])
                    for l in range(dim):
                        if not (is_zero(Gam[r, mu, l]) or is_zero(Gam[l, nu, s])):
                            t = t + Gam[r, mu, l] * Gam[l, nu, s]
                        if not (is_zero(Gam[r, nu, l]) or is_zero(Gam[l, mu, s])):
                            t = t - Gam[r, nu, l] * Gam[l, mu, s]
                    t = simplify(t)
                    R[r, s, mu, nu] = t
                    R[r, s, nu, mu] = simplify(-t)
    return R


def lc_ricci(Rc):
    """Ric_sn = R^r_srn."""
    dim = Rc.shape[0]
    Ric = zeros((dim, dim))
    for s in range(dim):
        for nu in range(dim):
            Ric[s, nu] = _sum(Rc[r, s, r, nu] for r in range(dim) if not is_zero(Rc[r, s, r, nu]))
    return Ric


def lc_scalar(lc, Ric):
    Ginv = lc.metric_inverse
    dim = Ginv.shape[0]
    return _sum(Ginv[a, b] * Ric[a, b] for a in range(dim) for b in range(dim)
                if not (is_zero(Ginv[a, b]) or is_zero(Ric[a, b])))


def lower_first(R, metric):
    """R_{a b c d} = g_{a t} R^t_{b c d}."""
    dim = R.shape[0]
    out = zeros(R.shape)
    for a in range(dim):
        for idx in np.ndindex(R.shape[1:]):
            out[(a,) + idx] = _sum(metric[a, t] * R[(t,) + idx] for t in range(dim)
                                   if not (is_zero(metric[a, t]) or is_zero(R[(t,) + idx])))
    return out


def riemann_symmetry_residuals(Rlow):
    """Arrays that vanish for a Levi-Civita Riemann tensor: pair antisymmetries,
    pair exchange and the first Bianchi identity."""
    dim = Rlow.shape[0]
    anti1, anti2, pair, bianchi = (zeros(Rlow.shape) for _ in range(4))
    for a, b, c, d in np.ndindex(Rlow.shape):
        anti1[a, b, c, d] = simplify(Rlow[a, b, c, d] + Rlow[b, a, c, d])
        anti2[a, b, c, d] = simplify(Rlow[a, b, c, d] + Rlow[a, b, d, c])
        pair[a, b, c, d] = simplify(Rlow[a, b, c, d] - Rlow[c, d, a, b])
        bianchi[a, b, c, d] = simplify(Rlow[a, b, c, d] + Rlow[a, c, d, b] + Rlow[a, d, b, c])
    return {"antisym_first": anti1, "antisym_last": anti2, "pair_exchange": pair, "bianchi": bianchi}


def adapted_lc_curvature(dc, Z, anh):
    """Levi-Civita curvature through the adapted route: coefficients D + Z in the adapted frame."""
    G = dc.full
    dim = G.shape[0]
    total = zeros((dim, dim, dim))
    for idx in np.ndindex(total.shape):
        total[idx] = simplify(G[idx] + Z[idx])
    return curvature_from_coefficients(total, anh.w, anh.ncon.e)


# -- Einstein residuals -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EinsteinInputs:
    lam: float = 0.0
    newtonG: float = 1.0
    stress: TensorField | None = None

    def __post_init__(self):
        if self.stress is not None:
            S = self.stress.components
            for a, b in np.ndindex(S.shape):
                if S[a, b] is not S[b, a] and not is_zero(simplify(S[a, b] - S[b, a])):
                    raise ValueError("stress tensor must be symmetric")


def einstein_tensor_residual(Ric, scalar, metric, inputs):
    """Ric_bg - 1/2 (R + lambda) g_bg - 8 pi G T_bg."""
    dim = metric.shape[0]
    T = inputs.stress.components if inputs.stress is not None else zeros((dim, dim))
    out = zeros((dim, dim))
    half = 0.5 * (scalar + inputs.lam)
    k = 8.0 * math.pi * inputs.newtonG
    for a in range(dim):
        for b in range(dim):
            out[a, b] = simplify(Ric[a, b] - half * metric[a, b] - k * T[a, b])
    return out


def einstein_residual(dm, inputs, connection_choice, points, dc=None, anh=None):
    """Max |residual| per block for the chosen connection.

    Returns dict block-name -> (max, evaluated, skipped).
    """
    from .connections import dconnection_for, levi_civita
    from .frames import anholonomy
    from .metrics import assemble_coordinate_metric

    chart = dm.chart
    n = chart.n
    if connection_choice == "levi_civita":
        G = assemble_coordinate_metric(dm)
        lc = levi_civita(G, chart)
        Ric = lc_ricci(lc_riemann(lc))
        res = einstein_tensor_residual(Ric, lc_scalar(lc, Ric), G, inputs)
    elif connection_choice == "normal_d":
        dc = dconnection_for(dm) if dc is None else dc
        anh = anholonomy(dm.ncon) if anh is None else anh
        Ric = dricci(dcurvature(dc, anh)).components
        res = einstein_tensor_residual(Ric, dscalar(dm, Ric), dm.adapted, inputs)
    else:
        raise ValueError(f"unknown connection choice {connection_choice!r}")
    blocks = {"hh": res[:n, :n], "hv": res[:n, n:], "vh": res[n:, :n], "vv": res[n:, n:]}
    return {name: residual_stats([arr], chart, points) for name, arr in blocks.items()}
