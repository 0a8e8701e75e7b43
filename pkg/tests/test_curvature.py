"""d-curvature, Ricci and scalar, the Levi-Civita oracle and Einstein residuals."""

import numpy as np
import pytest

from akgrav import connections as cn
from akgrav import curvature as cv
from akgrav.arrays import all_zero, residual_stats, sub, to_array
from akgrav.expr import evaluate, evaluate_array, parse
from akgrav.frames import NConnection, anholonomy
from akgrav.metrics import DMetric, assemble_coordinate_metric, lagrange_dmetric
from akgrav.sampling import halton_box
from akgrav.scenario import load_scenario

from .conftest import max_abs

GENERIC_L = "exp(x2)*y3^2 + (1 + x1^2)*y4^2 + 0.3*y3*y4"


def catalog_dmetric(name):
    sc = load_scenario(f"catalog:{name}")
    return DMetric(sc.chart, sc.g, sc.h, NConnection(sc.chart, sc.N)), sc


def derived(dm, pts=None):
    dc = cn.dconnection_for(dm, pts)
    anh = anholonomy(dm.ncon)
    return dc, anh, cv.dcurvature(dc, anh)


class TestDCurvature:
    def test_euclidean(self, chart):
        dm = lagrange_dmetric(parse("y3^2 + y4^2", chart), chart)
        _, _, cb = derived(dm)
        assert all_zero(cb.full)
        ric = cv.dricci(cb)
        assert all_zero(ric.components)
        assert evaluate(cv.dscalar(dm, ric), chart, np.zeros((1, 4)))[0] == 0.0

    @pytest.mark.parametrize("src", ["exp(x1)*(y3^2 + y4^2)", GENERIC_L])
    def test_block_formulas_and_antisymmetry(self, chart, points, src):
        dm = lagrange_dmetric(parse(src, chart), chart)
        dc, anh, cb = derived(dm)
        Rb, Pb, Sb = cv.dcurvature_blocks(dc, dm.ncon)
        stats = residual_stats([sub(cb.Rhhh, Rb), sub(cb.Phva, Pb), sub(cb.Svvv, Sb)], chart, points)
        assert stats[0] < 1e-10
        R = evaluate_array(Rb, chart, points)
        S = evaluate_array(Sb, chart, points)
        assert max_abs(R + np.swapaxes(R, 3, 4)) < 1e-12
        assert max_abs(S + np.swapaxes(S, 3, 4)) < 1e-12

    @pytest.mark.parametrize("name", ["schwarzschild", "sphere-v", "constcoeff-linear"])
    def test_cartan_second_structure_equation(self, name):
        dm, sc = catalog_dmetric(name)
        pts = halton_box(sc.box, 20, seed=4)
        dc, anh, cb = derived(dm, pts)
        diff = sub(cb.full, cv.cartan_curvature(dc, anh))
        assert residual_stats([diff], sc.chart, pts)[0] < 1e-10

    def test_cartan_generic_lagrangian(self, chart, points):
        dm = lagrange_dmetric(parse(GENERIC_L, chart), chart)
        dc, anh, cb = derived(dm)
        assert residual_stats([sub(cb.full, cv.cartan_curvature(dc, anh))], chart, points)[0] < 1e-10


class TestLeviCivitaOracle:
    def test_flat(self, chart):
        G = to_array([[parse("1" if i == j else "0", chart) for j in range(4)] for i in range(4)])
        assert all_zero(cv.lc_riemann(cn.levi_civita(G, chart)))

    @pytest.mark.parametrize("src", ["exp(x1)*(y3^2 + y4^2)", GENERIC_L])
    def test_symmetries(self, chart, points, src):
        G = assemble_coordinate_metric(lagrange_dmetric(parse(src, chart), chart))
        lc = cn.levi_civita(G, chart)
        sym = cv.riemann_symmetry_residuals(cv.lower_first(cv.lc_riemann(lc), G))
        for key, arr in sym.items():
            assert residual_stats([arr], chart, points)[0] < 1e-9, key

    def test_schwarzschild_component(self):
        dm, sc = catalog_dmetric("schwarzschild")
        lc = cn.levi_civita(assemble_coordinate_metric(dm), sc.chart)
        Rc = cv.lc_riemann(lc)
        pts = halton_box(sc.box, 30, seed=8)
        r = pts[:, 1]
        # R^t_rtr = 2M / (r^2 (r - 2M)) with M = 1
        got = evaluate(Rc[0, 1, 0, 1], sc.chart, pts)
        assert max_abs(got - 2.0 / (r**2 * (r - 2.0))) < 1e-12
        assert residual_stats([cv.lc_ricci(Rc)], sc.chart, pts)[0] < 1e-8

    def test_sphere_scalar_sign(self):
        dm, sc = catalog_dmetric("sphere-v")
        pts = halton_box(sc.box, 20, seed=9)
        lc = cn.levi_civita(assemble_coordinate_metric(dm), sc.chart)
        scal_lc = evaluate(cv.lc_scalar(lc, cv.lc_ricci(cv.lc_riemann(lc))), sc.chart, pts)
        dc, anh, cb = derived(dm, pts)
        scal_d = evaluate(cv.dscalar(dm, cv.dricci(cb)), sc.chart, pts)
        # radius r0 = 2: R = 2 / r0^2
        assert scal_lc == pytest.approx(np.full(20, 0.5), abs=1e-12)
        assert scal_d == pytest.approx(np.full(20, 0.5), abs=1e-12)

    @pytest.mark.parametrize("src", ["exp(x1)*(y3^2 + y4^2)", GENERIC_L])
    def test_scalar_two_routes(self, chart, points, src):
        dm = lagrange_dmetric(parse(src, chart), chart)
        dc, anh, _ = derived(dm)
        lc = cn.levi_civita(assemble_coordinate_metric(dm), chart)
        direct = cv.lc_scalar(lc, cv.lc_ricci(cv.lc_riemann(lc)))
        Z = cn.distortion(dm, dc)
        adapted = cv.dscalar(dm, cv.dricci(cv.adapted_lc_curvature(dc, Z, anh)))
        assert max_abs(evaluate(direct, chart, points) - evaluate(adapted, chart, points)) < 1e-8


class TestEinstein:
    def test_minkowski(self):
        from akgrav.expr import Chart

        chart = Chart(("t", "x"), ("y", "z"))
        g = to_array([[parse("-1", chart), parse("0", chart)], [parse("0", chart), parse("1", chart)]])
        h = to_array([[parse("1", chart), parse("0", chart)], [parse("0", chart), parse("1", chart)]])
        dm = DMetric(chart, g, h, NConnection.zero(chart))
        pts = halton_box([(-1, 1)] * 4, 10, seed=1)
        for choice in ("levi_civita", "normal_d"):
            res = cv.einstein_residual(dm, cv.EinsteinInputs(), choice, pts)
            assert max(v[0] for v in res.values()) == 0.0

    def test_schwarzschild(self):
        dm, sc = catalog_dmetric("schwarzschild")
        pts = halton_box(sc.box, 50, seed=13)
        lc = cv.einstein_residual(dm, cv.EinsteinInputs(), "levi_civita", pts)
        assert max(v[0] for v in lc.values()) < 1e-8
        # the d-connection equations differ from Einstein's without distortion terms
        nd = cv.einstein_residual(dm, cv.EinsteinInputs(), "normal_d", pts)
        assert max(v[0] for v in nd.values()) > 1e-3

    def test_cosmological_constant(self):
        # the 2-sphere of radius 2 times a flat plane: Ric = diag(0, 0, 1/4 h); R = 1/2
        dm, sc = catalog_dmetric("sphere-v")
        pts = halton_box(sc.box, 10, seed=2)
        res = cv.einstein_residual(dm, cv.EinsteinInputs(lam=1.0), "levi_civita", pts)
        # hh block: 0 - 1/2 (1/2 + 1) * 1
        assert res["hh"][0] == pytest.approx(0.75, abs=1e-12)

    def test_stress_must_be_symmetric(self, chart):
        from akgrav.almost_kahler import COORDINATE, TensorField

        T = to_array([[parse("1" if (i, j) == (0, 1) else "0", chart) for j in range(4)] for i in range(4)])
        with pytest.raises(ValueError):
            cv.EinsteinInputs(stress=TensorField(T, (("full", "down"), ("full", "down")), COORDINATE, "T"))

    def test_unknown_choice(self, chart, exp_L, points):
        with pytest.raises(ValueError):
            cv.einstein_residual(lagrange_dmetric(exp_L, chart), cv.EinsteinInputs(), "weyl", points)

