"""Scenario orchestration: derived objects, the invariant suite and the connection comparison."""

from __future__ import annotations

import warnings
from functools import cached_property

import numpy as np

from . import almost_kahler as ak
from . import connections as cn
from . import constcoeff as cc
from . import curvature as cv
from .arrays import residual_stats, sub, zeros
from .errors import ScenarioError
from .expr import ZERO, deriv, evaluate_array, fd_derivative, is_zero, simplify, to_string
from .frames import (NConnection, anholonomy, commutator_residuals, elongated_frame, ncurvature,
                     ncurvature_frame_form)
from .metrics import DMetric, assemble_coordinate_metric, dmetric_from_coordinate, frame_match_solve, lagrange_dmetric
from .report import CheckReport
from .sampling import sample_points

DEFAULT_TOLERANCES = {
    "fd_probes": 1e-5,
    "commutator": 1e-9,
    "ncurv_dual": 1e-10,
    "J2": 1e-12,
    "theta_antisym": 1e-12,
    "neijenhuis_oracle": 1e-9,
    "dtheta": 1e-10,
    "theta_potential": 1e-10,
    "compat_g": 1e-10,
    "compat_theta": 1e-10,
    "torsion_hh_vv": 1e-10,
    "torsion_omega": 1e-10,
    "torsion_blocks": 1e-10,
    "cartan1": 1e-10,
    "cartan2": 1e-10,
    "curvature_blocks": 1e-10,
    "curvature_antisym": 1e-10,
    "deflc": 1e-9,
    "lc_metric": 1e-10,
    "lc_symmetries": 1e-9,
    "lc_scalar_routes": 1e-8,
    "vacuum_lc": 1e-8,
    "vacuum_adapted": 1e-8,
    "einstein_lc": 1e-8,
    "frame_match": 1e-9,
    "auxf1": 1e-12,
    "const_match": 1e-12,
    "const_curvature": 1e-12,
    "constancy_curvature": 1e-12,
    "constancy_scalar": 1e-12,
    "const_compat": 1e-10,
}

J2_POINTS = 100
FD_PROBES = 200
CONSTANCY_POINTS = 20
FRAME_MATCH_POINTS = 20

# negative control -> object to corrupt
NEGATIVE_CONTROLS = {
    "compat_g": "dconnection",
    "compat_theta": "dconnection",
    "deflc": "dconnection",
    "torsion_hh_vv": "dconnection",
    "lc_scalar_routes": "dconnection",
    "vacuum_adapted": "dconnection",
    "torsion_blocks": "dconnection_blocks",
    "cartan1": "dconnection_blocks",
    "cartan2": "dconnection_blocks",
    "curvature_blocks": "dconnection_blocks",
    "J2": "J",
    "theta_antisym": "theta",
    "dtheta": "theta",
    "theta_potential": "theta",
    "commutator": "anholonomy",
    "neijenhuis_oracle": "anholonomy",
    "torsion_omega": "omega",
    "ncurv_dual": "omega",
    "lc_metric": "levi_civita",
    "lc_symmetries": "levi_civita",
    "vacuum_lc": "levi_civita",
    "einstein_lc": "levi_civita",
    "fd_probes": "derivative",
    "frame_match": "vierbein",
    "auxf1": "nconnection",
    "const_match": "nconnection",
    "constancy_curvature": "nconnection",
    "constancy_scalar": "vmetric",
    "const_curvature": "const_algebraic",
    "const_compat": "const_connection",
}

PERTURBATION = 0.1


class Model:
    """Lazily derived geometric objects of one scenario."""

    def __init__(self, scenario, points=None, seed=None, perturb=None):
        self.sc = scenario
        self.chart = scenario.chart
        self.num_points = scenario.num_points if points is None else int(points)
        self.seed = scenario.seed if seed is None else int(seed)
        self.perturb = perturb
        self.provenance = {}

    # -- sampling ----------------------------------------------------------------
    def points(self, num=None):
        num = self.num_points if num is None else num
        v_slots = tuple(range(self.chart.n, self.chart.dim)) if self.sc.source == "generating_function" else ()
        return sample_points(self.sc.box, num, self.seed, v_slots, 0.1)

    @cached_property
    def pts(self):
        return self.points()

    # -- metric data --------------------------------------------------------------
    @property
    def L(self):
        return self.sc.L

    @property
    def L_induced(self):
        return self.sc.source == "generating_function"

    @cached_property
    def dm(self):
        sc = self.sc
        if sc.source == "generating_function":
            return lagrange_dmetric(sc.L, self.chart)
        if sc.source == "metric_blocks":
            return DMetric(self.chart, sc.g, sc.h, NConnection(self.chart, sc.N))
        return dmetric_from_coordinate(sc.G, self.chart)

    @cached_property
    def ncon(self):
        return self.dm.ncon

    @cached_property
    def omega(self):
        Om = ncurvature(self.ncon)
        if self.perturb == "omega":
            Om = Om.copy()
            Om[0, 0, 1] = simplify(Om[0, 0, 1] + PERTURBATION)
            Om[0, 1, 0] = simplify(Om[0, 1, 0] - PERTURBATION)
        return Om

    @cached_property
    def anh(self):
        anh = anholonomy(self.ncon)
        if self.perturb == "anholonomy":
            w = anh.w.copy()
            n = self.chart.n
            # horizontal part of [e_0, e_1]: survives in the Neijenhuis tensor
            j = 1 if n > 1 else n
            w[0, 0, j] = simplify(w[0, 0, j] + PERTURBATION)
            w[0, j, 0] = simplify(w[0, j, 0] - PERTURBATION)
            anh = type(anh)(self.ncon, w)
        return anh

    @cached_property
    def anh_exact(self):
        return anholonomy(self.ncon)

    @property
    def paired(self):
        return self.chart.n == self.chart.m

    @cached_property
    def identified(self):
        return self.paired and self.dm.identification_residual(self.pts) <= 1e-10

    @cached_property
    def J(self):
        J = ak.almost_complex(self.ncon)
        if self.perturb == "J":
            comps = J.components.copy()
            comps[0, self.chart.n] = simplify(comps[0, self.chart.n] + PERTURBATION)
            J = ak.TensorField(comps, J.slots, J.frame, "J")
        return J

    @cached_property
    def theta(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            th = ak.symplectic_form(self.dm, ak.almost_complex(self.ncon))
        if self.perturb == "theta":
            comps = th.components.copy()
            n = self.chart.n
            bump = PERTURBATION * (1.0 + self.chart.var(1 if self.chart.n > 1 else 0))
            comps[0, n] = simplify(comps[0, n] + bump)
            th = ak.DifferentialForm(2, comps, th.frame, "theta")
        return th

    @cached_property
    def G(self):
        return assemble_coordinate_metric(self.dm)

    @cached_property
    def dc_exact(self):
        dc = cn.dconnection_for(self.dm, self.pts)
        self.provenance["d_connection"] = dc.label
        return dc

    def _corrupt(self, dc):
        # one asymmetric Lh shift (torsion), one x-dependent Lh and Lv shift each (curvature)
        n = self.chart.n
        j = 1 if n > 1 else 0
        x = self.chart.var(j)
        dc = dc.perturbed("Lh", (0, 0, j), PERTURBATION)
        dc = dc.perturbed("Lh", (j, 0, 0), PERTURBATION * x)
        return dc.perturbed("Lv", (0, 0, 0), PERTURBATION * x)

    @cached_property
    def dc(self):
        if self.perturb == "dconnection":
            return self._corrupt(self.dc_exact)
        return self.dc_exact

    @cached_property
    def dc_blocks(self):
        """Connection fed to the block formulas (second route of the Cartan checks)."""
        if self.perturb == "dconnection_blocks":
            return self._corrupt(self.dc)
        return self.dc

    @cached_property
    def lc(self):
        lc = cn.levi_civita(self.G, self.chart)
        if self.perturb == "levi_civita":
            Gam = lc.G.copy()
            Gam[0, 0, 1] = simplify(Gam[0, 0, 1] + PERTURBATION)
            Gam[0, 1, 0] = Gam[0, 0, 1]
            lc = cn.ChristoffelField(self.chart, Gam, lc.metric, lc.metric_inverse)
        return lc

    @cached_property
    def Z(self):
        return cn.distortion(self.dm, self.dc_exact, self.omega)

    @cached_property
    def lc_adapted(self):
        return cn.lc_in_adapted_frame(self.lc, self.ncon)

    @cached_property
    def torsion(self):
        return cn.torsion(self.dc, self.anh)

    @cached_property
    def curv(self):
        return cv.dcurvature(self.dc, self.anh)

    @cached_property
    def ricci(self):
        return cv.dricci(self.curv)

    @cached_property
    def dscalar(self):
        return cv.dscalar(self.dm, self.ricci)

    @cached_property
    def lc_riemann(self):
        return cv.lc_riemann(self.lc)

    @cached_property
    def lc_ricci(self):
        return cv.lc_ricci(self.lc_riemann)

    @cached_property
    def lc_scalar(self):
        return cv.lc_scalar(self.lc, self.lc_ricci)

    @cached_property
    def adapted_lc_curvature(self):
        return cv.adapted_lc_curvature(self.dc, self.Z, self.anh)

    # -- constant-coefficient data ----------------------------------------------------
    @property
    def constcoeff(self):
        return self.sc.constcoeff

    @cached_property
    def const_metric(self):
        g0 = evaluate_array(self.dm.g, self.chart, self.pts[:1])[0]
        h0 = evaluate_array(self.dm.h, self.chart, self.pts[:1])[0]
        return cc.ConstDMetric(g0, h0)

    @cached_property
    def const_ncon(self):
        """N-connection fed to the constant-coefficient checks (optionally corrupted)."""
        if self.perturb != "nconnection":
            return self.ncon
        N = self.ncon.N.copy()
        y = self.chart.var(self.chart.dim - 1)
        N[0, 0] = simplify(N[0, 0] + PERTURBATION * y * y)
        return NConnection(self.chart, N)

    @cached_property
    def L0(self):
        L0 = cc.solve_auxf1_linear(self.const_metric, self.ncon)
        if self.perturb == "const_connection":
            arr = L0.L0.copy()
            arr[0, 0, 0] += PERTURBATION
            L0 = cc.ConstDConnection(arr)
        return L0

    @cached_property
    def L0_algebraic(self):
        """L0 fed to the algebraic curvature route only."""
        if self.perturb != "const_algebraic":
            return self.L0
        arr = self.L0.L0.copy()
        arr[0, 0, -1] += PERTURBATION
        return cc.ConstDConnection(arr)

    @cached_property
    def const_h(self):
        """v-block fed to the constancy checks (optionally made y-dependent)."""
        h = self.dm.h
        if self.perturb == "vmetric":
            h = h.copy()
            y = self.chart.var(self.chart.n)
            h[-1, -1] = simplify(h[-1, -1] * (1.0 + PERTURBATION * y * y))
        return h

    @cached_property
    def const_dc(self):
        return self.L0.as_dconnection(self.chart)


# -- checks --------------------------------------------------------------------------

def _tol(model, key, overrides):
    if key in overrides:
        return overrides[key]
    if key in model.sc.tolerances:
        return model.sc.tolerances[key]
    return DEFAULT_TOLERANCES[key]


def _fd_probe_stats(model, rng):
    """Relative |central difference - symbolic derivative| on random (expression, point) probes."""
    chart = model.chart
    pool = [e for e in list(model.dm.g.ravel()) + list(model.dm.h.ravel()) + list(model.ncon.N.ravel())
            if not is_zero(e)]
    if model.L is not None:
        pool.append(model.L)
        pool.extend(deriv(model.L, v) for v in chart.v_names)
    # first derivatives of the pool are probed too (second-order coverage)
    pool = pool + [deriv(e, name) for e in pool[:8] for name in chart.names]
    pool = [e for e in pool if not is_zero(e)]
    if not pool:
        return 0.0, FD_PROBES, 0
    pts = model.points(max(FD_PROBES, 1))
    worst = 0.0
    skipped = 0
    for k in range(FD_PROBES):
        e = pool[int(rng.integers(len(pool)))]
        var = chart.names[int(rng.integers(chart.dim))]
        p = pts[k % len(pts)]
        try:
            fd = fd_derivative(e, chart, var, p, 1e-5)
            from .expr import eval_at

            sym = eval_at(deriv(e, var), chart, p)
        except Exception:
            skipped += 1
            continue
        if model.perturb == "derivative":
            sym += 1e-3
        worst = max(worst, abs(fd - sym) / max(1.0, abs(sym)))
    return worst, FD_PROBES, skipped


def _frame_match_stats(model):
    pts = model.points(FRAME_MATCH_POINTS)
    chart = model.chart
    worst = 0.0
    skipped = 0
    for p in pts:
        g = evaluate_array(model.dm.g, chart, p)[0]
        h = evaluate_array(model.dm.h, chart, p)[0]
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h))):
            skipped += 1
            continue
        # target: the constant sign-normal form of the source signature
        target = DMetric(chart, np.diag(np.sign(np.linalg.eigvalsh(g))), np.diag(np.sign(np.linalg.eigvalsh(h))),
                         NConnection.zero(chart))
        vb = frame_match_solve(target, model.dm, p)
        e = vb.e
        if model.perturb == "vierbein":
            e = e + 1e-3
        Gt = evaluate_array(target.adapted, chart, p)[0]
        Gs = evaluate_array(model.dm.adapted, chart, p)[0]
        worst = max(worst, float(np.linalg.norm(e.T @ Gt @ e - Gs)))
    return worst, len(pts), skipped


def run_check(scenario, points=None, seed=None, tolerances=None, negative_control=None):
    """Run every applicable invariant; returns a CheckReport."""
    tolerances = dict(tolerances or {})
    perturb = None
    if negative_control is not None:
        if negative_control not in NEGATIVE_CONTROLS:
            raise ScenarioError(f"no negative control for check {negative_control!r}; "
                                f"known: {', '.join(sorted(NEGATIVE_CONTROLS))}")
        perturb = NEGATIVE_CONTROLS[negative_control]
    model = Model(scenario, points, seed, perturb)
    chart = model.chart
    n, dim = chart.n, chart.dim
    pts = model.pts
    rep = CheckReport(scenario.name)
    tol = lambda key: _tol(model, key, tolerances)  # noqa: E731
    rep.metadata["negative_control"] = negative_control or "none"
    rng = np.random.default_rng(model.seed)

    rep.add("fd_probes", _fd_probe_stats(model, rng), tol("fd_probes"), note="relative error")
    rep.add("commutator", residual_stats([commutator_residuals(model.anh)], chart, pts), tol("commutator"))
    rep.add("ncurv_dual", residual_stats([sub(model.omega, ncurvature_frame_form(model.ncon))], chart, pts),
            tol("ncurv_dual"))

    if model.paired:
        Jc = ak.coordinate_endomorphism(model.J, model.ncon)
        jp = model.points(J2_POINTS)
        vals = evaluate_array(Jc, chart, jp)
        sq = vals @ vals + np.eye(dim)
        ok = np.all(np.isfinite(sq.reshape(len(jp), -1)), axis=1)
        rep.add("J2", (float(np.max(np.abs(sq[ok]))) if ok.any() else float("nan"), len(jp),
                       int(np.count_nonzero(~ok))), tol("J2"))
        th = model.theta.components
        rep.add("theta_antisym", residual_stats([th + th.T], chart, pts), tol("theta_antisym"),
                informative=not model.identified,
                note="" if model.identified else "blocks not identified: reported only")
        nj = ak.neijenhuis(model.J, model.anh)
        rep.add("neijenhuis_oracle",
                residual_stats([sub(nj.components, ak.neijenhuis_coordinate_oracle(model.ncon))], chart, pts),
                tol("neijenhuis_oracle"))
        dth = ak.exterior_derivative(model.theta, model.anh_exact)
        rep.add("dtheta", residual_stats([dth.components], chart, pts), tol("dtheta"),
                informative=not model.L_induced,
                note="" if model.L_induced else "not L-induced: reported only")
        if model.L_induced:
            om = ak.to_adapted(ak.liouville_potential(model.L, chart), model.ncon)
            dom = ak.exterior_derivative(om, model.anh_exact)
            rep.add("theta_potential", residual_stats([sub(model.theta.components, dom.components)], chart, pts),
                    tol("theta_potential"))

    comp = cn.compatibility_residuals(model.dm, model.dc, model.theta if model.paired else None, pts)
    rep.add("compat_g", comp["Dg"], tol("compat_g"))
    if "Dtheta" in comp:
        rep.add("compat_theta", comp["Dtheta"], tol("compat_theta"), informative=not model.identified,
                note="" if model.identified else "blocks not identified: reported only")

    T = model.torsion
    pure = [T[:n, :n, :n], T[n:, n:, n:]]
    rep.add("torsion_hh_vv", residual_stats(pure, chart, pts), tol("torsion_hh_vv"))
    rep.add("torsion_omega", residual_stats([sub(T[n:, :n, :n], model.omega)], chart, pts), tol("torsion_omega"))
    rep.add("torsion_blocks",
            residual_stats([sub(T, cn.torsion_blocks(model.dc_blocks, model.ncon, model.omega))], chart, pts),
            tol("torsion_blocks"))
    rep.add("cartan1", residual_stats([sub(cn.torsion(model.dc_blocks, model.anh), cn.cartan_torsion(model.dc, model.anh))],
                                      chart, pts), tol("cartan1"))

    rep.add("cartan2", residual_stats([sub(cv.curvature_from_coefficients(model.dc_blocks.full, model.anh.w, model.ncon.e),
                                           cv.cartan_curvature(model.dc, model.anh))], chart, pts), tol("cartan2"))
    Rb, Pb, Sb = cv.dcurvature_blocks(model.dc_blocks, model.ncon, model.omega)
    rep.add("curvature_blocks", residual_stats([sub(model.curv.Rhhh, Rb), sub(model.curv.Phva, Pb),
                                                sub(model.curv.Svvv, Sb)], chart, pts), tol("curvature_blocks"))
    anti = [zeros(Rb.shape), zeros(Sb.shape)]
    for blk, src in ((anti[0], Rb), (anti[1], Sb)):
        for a, b, g, d in np.ndindex(src.shape):
            blk[a, b, g, d] = simplify(src[a, b, g, d] + src[a, b, d, g])
    rep.add("curvature_antisym", residual_stats(anti, chart, pts), tol("curvature_antisym"))

    rep.add("deflc", cn.reconcile_deflc(model.lc, model.dc, model.Z, model.ncon, pts, model.lc_adapted), tol("deflc"))
    rep.add("lc_metric", residual_stats([cn.metric_derivative_residual(model.lc)], chart, pts), tol("lc_metric"))
    sym = cv.riemann_symmetry_residuals(cv.lower_first(model.lc_riemann, model.lc.metric))
    rep.add("lc_symmetries", residual_stats(list(sym.values()), chart, pts), tol("lc_symmetries"))
    ad_ric = cv.dricci(model.adapted_lc_curvature)
    ad_scalar = cv.dscalar(model.dm, ad_ric)
    rep.add("lc_scalar_routes", residual_stats([np.array([simplify(model.lc_scalar - ad_scalar)], dtype=object)],
                                               chart, pts), tol("lc_scalar_routes"))
    if scenario.vacuum:
        rep.add("vacuum_lc", residual_stats([model.lc_ricci], chart, pts), tol("vacuum_lc"))
        rep.add("vacuum_adapted", residual_stats([ad_ric.components], chart, pts), tol("vacuum_adapted"))
        inputs = cv.EinsteinInputs(scenario.lam, scenario.newton_g, _stress(scenario))
        res = cv.einstein_tensor_residual(model.lc_ricci, model.lc_scalar, model.G, inputs)
        rep.add("einstein_lc", residual_stats([res], chart, pts), tol("einstein_lc"))
        resd = cv.einstein_tensor_residual(model.ricci.components, model.dscalar, model.dm.adapted, inputs)
        rep.add("einstein_normal_d", residual_stats([resd], chart, pts), None, informative=True,
                note="d-connection field equations differ from Einstein's without distortion terms")

    rep.add("frame_match", _frame_match_stats(model), tol("frame_match"))

    if model.constcoeff:
        _constcoeff_checks(model, rep, tol)

    rep.provenance.update(model.provenance)
    rep.provenance.update(_provenance(model))
    return rep


def _stress(scenario):
    if scenario.stress is None:
        return None
    return ak.TensorField(np.array(scenario.stress, dtype=object), (("full", "down"), ("full", "down")),
                          ak.COORDINATE, "T")


def _constcoeff_checks(model, rep, tol):
    chart = model.chart
    pts = model.pts
    cp = model.points(CONSTANCY_POINTS)
    ncon = model.const_ncon
    rep.add("auxf1", cc.verify_auxf1(ncon, model.const_metric, model.L0, pts), tol("auxf1"))
    # the canonical d-connection of (g0, h0, N) should coincide with the constant one
    dm = DMetric(chart, model.dm.g, model.const_h, ncon)
    canon = cn.canonical_dconnection(dm)
    const = model.const_dc
    rep.add("const_match", residual_stats([sub(canon.full, const.full)], chart, pts), tol("const_match"))
    anh = anholonomy(ncon)
    full = cv.curvature_from_coefficients(const.full, anh.w, ncon.e)
    expected = cc.const_full_curvature(model.const_metric.g0, model.L0_algebraic)
    rep.add("const_curvature", residual_stats([sub(full, expected)], chart, pts), tol("const_curvature"))
    canon_curv = cv.dcurvature(canon, anh)
    rep.add("constancy_curvature", cc.constancy_variance(canon_curv.full, chart, cp), tol("constancy_curvature"),
            note="variance across points")
    scal = cv.dscalar(dm, cv.dricci(canon_curv))
    rep.add("constancy_scalar", cc.constancy_variance(np.array([scal], dtype=object), chart, cp),
            tol("constancy_scalar"), note="variance across points")
    rep.add("const_compat", residual_stats([cn.covariant_derivative_2(const, ncon, dm.adapted)], chart, pts),
            tol("const_compat"))
    rep.add("lc_scalar_variance", cc.constancy_variance(np.array([model.lc_scalar], dtype=object), chart, cp),
            None, informative=True, note="Levi-Civita scalar is not expected to be constant")
    rep.data["const_scalar"] = float(f"{cc.const_scalar(model.const_metric, model.L0):.12e}")


def _provenance(model):
    prov = {
        "frame_convention": "Gamma[g,a,b] = (D_{e_b} e_a)^g; [e_i, e_j] = Omega^a_ij e_a",
        "torsion_sign": "T = Gamma[g,a,b] - Gamma[g,b,a] + w[g,a,b]",
        "curvature_convention": "R^a_bgd = [R(e_d, e_g) e_b]^a, Ricci_bg = R^a_bga",
        "theta_convention": "theta_ab = g_gb J^g_a",
        "points": model.num_points,
        "seed": model.seed,
        "sampling": "scrambled Halton in the scenario box",
        "vierbein_gauge": "block-diagonal; symmetric positive blocks (definite), eigen-congruence (indefinite)",
    }
    if model.L_induced:
        prov["index_pairing"] = "v-index (i) paired with h-index i"
    return prov


# -- derive / compare ------------------------------------------------------------------

def _dump_array(name, formula, arr, chart, point, lines):
    lines.append(f"[{name}]")
    lines.append(f"# {formula}")
    vals = evaluate_array(arr, chart, point)[0]
    count = 0
    for idx in np.ndindex(arr.shape):
        e = arr[idx]
        if is_zero(e):
            continue
        count += 1
        v = vals[idx]
        lines.append(f"{name}{list(idx)} = {to_string(e)}    ; at p0: {v:.12g}")
    if not count:
        lines.append("all components zero")
    lines.append("")


def run_derive(scenario, points=None, seed=None):
    """Text dump of every derived object with its values at the first sample point."""
    model = Model(scenario, points, seed)
    chart = model.chart
    p0 = model.pts[:1]
    lines = [f"# derived objects: {scenario.name}",
             f"# chart: h = {', '.join(chart.h_names)}; v = {', '.join(chart.v_names)}",
             f"# p0 = {[float(f'{v:.12g}') for v in p0[0]]}", ""]
    lines.append("[point p0]")
    lines.append(" ".join(f"{nm}={v:.12g}" for nm, v in zip(chart.names, p0[0])))
    lines.append("")
    if model.L is not None:
        _dump_array("L", "generating function", np.array([model.L], dtype=object), chart, p0, lines)
    _dump_array("g", "h-block g_ij", model.dm.g, chart, p0, lines)
    _dump_array("h", "v-block h_ab", model.dm.h, chart, p0, lines)
    _dump_array("N", "N-connection N[a,i] = N^a_i", model.ncon.N, chart, p0, lines)
    _dump_array("Omega", "N-connection curvature Omega[a,i,j]", model.omega, chart, p0, lines)
    if model.paired:
        _dump_array("J", "almost complex structure J[g,a] (adapted frame)", model.J.components, chart, p0, lines)
        _dump_array("theta", "theta[a,b] = g(J e_a, e_b)", model.theta.components, chart, p0, lines)
    dc = model.dc
    _dump_array("Gamma", f"{dc.label} d-connection Gamma[g,a,b] = (D_e_b e_a)^g", dc.full, chart, p0, lines)
    _dump_array("T", "torsion T[g,a,b]", model.torsion, chart, p0, lines)
    _dump_array("R", "curvature R[a,b,g,d] = R(e_d, e_g) e_b", model.curv.full, chart, p0, lines)
    _dump_array("Ricci", "Ricci[b,g] = R^a_bga", model.ricci.components, chart, p0, lines)
    _dump_array("scalar", "g^ij R_ij + h^ab R_ab", np.array([model.dscalar], dtype=object), chart, p0, lines)
    _dump_array("Z", "distortion Z = nabla - D (adapted frame)", model.Z, chart, p0, lines)
    _dump_array("LC_Ricci", "Levi-Civita Ricci (coordinates)", model.lc_ricci, chart, p0, lines)
    _dump_array("LC_scalar", "Levi-Civita scalar curvature", np.array([model.lc_scalar], dtype=object), chart, p0,
                lines)
    return "\n".join(lines)


def run_compare(scenario, points=None, seed=None):
    model = Model(scenario, points, seed)
    return cc.table1_report(model)
