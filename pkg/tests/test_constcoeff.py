"""Constant-coefficient d-connections for constant d-metrics with N linear in y."""

import numpy as np
import pytest

from akgrav import connections as cn
from akgrav import constcoeff as cc
from akgrav import curvature as cv
from akgrav.arrays import residual_stats, sub, to_array
from akgrav.errors import DegenerateMetric, NonConstantRHS
from akgrav.expr import ZERO, Chart, Const, evaluate, parse
from akgrav.frames import NConnection, anholonomy
from akgrav.metrics import DMetric
from akgrav.pipeline import run_check, run_compare
from akgrav.sampling import halton_box
from akgrav.scenario import load_scenario


def linear_ncon(chart, A, offset=None):
    """N^a_k = A[a, k, b] y^b (+ offset[a][k])."""
    m, n = chart.m, chart.n
    N = np.empty((m, n), dtype=object)
    for a in range(m):
        for k in range(n):
            e = ZERO if offset is None else parse(offset[a][k], chart)
            for b in range(m):
                if A[a, k, b]:
                    e = e + float(A[a, k, b]) * chart.var(n + b)
            N[a, k] = e
    return NConnection(chart, N)


def brute_force_L0(h0, A):
    """Index-by-index expansion of 2 L0^a_bk = A^a_kb - h0^ac h0_db A^d_kc."""
    m, n, _ = A.shape
    hi = np.linalg.inv(h0)
    L0 = np.zeros((m, m, n))
    for a in range(m):
        for b in range(m):
            for k in range(n):
                s = A[a, k, b]
                for c in range(m):
                    for d in range(m):
                        s -= hi[a, c] * h0[d, b] * A[d, k, c]
                L0[a, b, k] = 0.5 * s
    return L0


def const_dmetric(chart, g0, h0, ncon):
    g = to_array([[Const(float(v)) for v in row] for row in g0])
    h = to_array([[Const(float(v)) for v in row] for row in h0])
    return DMetric(chart, g, h, ncon)


CHART3 = Chart(("x1", "x2"), ("y3", "y4", "y5"))
BOX3 = [(-1, 1), (-1, 1), (-1.5, 1.5), (-1.5, 1.5), (-1.5, 1.5)]
H3 = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, -0.2], [0.0, -0.2, 1.5]])
A3 = np.random.default_rng(7).uniform(-1, 1, size=(3, 2, 3)).round(3)


class TestSolve:
    def test_zero_family(self):
        L0 = cc.solve_auxf1_linear(np.eye(2), np.zeros((2, 2, 2)))
        assert not np.any(L0.L0)

    def test_identity_single_entry(self):
        A = np.zeros((2, 2, 2))
        A[0, 0, 1] = 1.0  # A^3_14
        L0 = cc.solve_auxf1_linear(np.eye(2), A).L0
        assert L0[0, 1, 0] == 0.5  # L0^3_41
        assert L0[1, 0, 0] == -0.5

    def test_diag_1_2_brute_force(self):
        A = np.zeros((2, 2, 2))
        A[0, 0, 1] = 1.0
        h0 = np.diag([1.0, 2.0])
        L0 = cc.solve_auxf1_linear(h0, A).L0
        assert L0 == pytest.approx(brute_force_L0(h0, A), abs=0)
        assert L0[0, 1, 0] == 0.5
        assert L0[1, 0, 0] == -0.25

    def test_general_brute_force(self):
        L0 = cc.solve_auxf1_linear(H3, A3).L0
        assert L0 == pytest.approx(brute_force_L0(H3, A3), abs=1e-15)

    def test_from_nconnection(self):
        # a y-independent offset does not enter the linear coefficients
        ncon = linear_ncon(CHART3, A3, [["x1", "0"], ["1", "x1*x2"], ["0", "sin(x2)"]])
        assert cc.linear_coefficients(ncon) == pytest.approx(A3, abs=0)

    def test_nonlinear_rejected(self, chart):
        N = to_array([[parse("y3^2", chart), ZERO], [ZERO, ZERO]])
        with pytest.raises(NonConstantRHS):
            cc.linear_coefficients(NConnection(chart, N))

    def test_singular_h0(self):
        with pytest.raises(DegenerateMetric):
            cc.ConstDMetric(np.eye(2), np.array([[1.0, 1.0], [1.0, 1.0]]))


class TestVerify:
    def test_identity_symmetric_family(self, chart, points):
        # h0 = I, A^a_kb symmetric in (a, b): the zero connection solves the condition
        A = np.zeros((2, 2, 2))
        A[0, 0, 1] = A[1, 0, 0] = 0.7
        A[0, 1, 0] = 1.1
        ncon = linear_ncon(chart, A)
        assert cc.verify_auxf1(ncon, np.eye(2), np.zeros((2, 2, 2)), points)[0] == 0.0

    def test_y_independent(self, chart, points):
        N = to_array([[parse("x1*x2", chart), parse("3", chart)], [parse("sin(x1)", chart), ZERO]])
        assert cc.verify_auxf1(NConnection(chart, N), np.diag([1.0, 2.0]), np.zeros((2, 2, 2)), points)[0] == 0.0

    def test_solution_verifies(self):
        ncon = linear_ncon(CHART3, A3, [["x1", "0"], ["1", "x1*x2"], ["0", "sin(x2)"]])
        L0 = cc.solve_auxf1_linear(H3, ncon)
        pts = halton_box(BOX3, 20, seed=2)
        assert cc.verify_auxf1(ncon, H3, L0, pts)[0] < 1e-12

    def test_rescale_invariance(self):
        ncon = linear_ncon(CHART3, A3)
        pts = halton_box(BOX3, 20, seed=3)
        trial = np.random.default_rng(1).uniform(-1, 1, size=(3, 3, 2))
        r1 = cc.verify_auxf1(ncon, H3, trial, pts)[0]
        r5 = cc.verify_auxf1(ncon, 5.0 * H3, trial, pts)[0]
        assert r1 > 1e-3
        assert r5 == pytest.approx(r1, rel=1e-12)

    def test_wrong_connection_fails(self, chart, points):
        A = np.zeros((2, 2, 2))
        A[0, 0, 1] = 1.0
        ncon = linear_ncon(chart, A)
        assert cc.verify_auxf1(ncon, np.eye(2), np.zeros((2, 2, 2)), points)[0] > 1e-3


class TestCurvature:
    def test_zero(self):
        assert not np.any(cc.const_curvature(np.zeros((3, 3, 2))))

    def test_single_entry(self):
        L0 = np.zeros((3, 3, 2))
        L0[1, 2, 0] = 0.8
        assert not np.any(cc.const_curvature(L0))

    def test_brute_force_commutator(self):
        L0 = np.random.default_rng(3).normal(size=(3, 3, 2))
        R = cc.const_curvature(L0)
        for a, b, j, k in np.ndindex(R.shape):
            want = sum(L0[c, b, j] * L0[a, c, k] - L0[c, b, k] * L0[a, c, j] for c in range(3))
            assert R[a, b, j, k] == pytest.approx(want, abs=1e-14)

    def test_two_dimensional_fibre_is_flat(self, chart):
        # L0 is h0-skew in (a, b); 2x2 skew generators commute, so R vanishes
        A = np.random.default_rng(5).uniform(-1, 1, size=(2, 2, 2))
        L0 = cc.solve_auxf1_linear(np.diag([1.0, 2.0]), A)
        assert np.max(np.abs(cc.const_curvature(L0))) < 1e-15

    def test_adapted_frame_route_and_constancy(self):
        ncon = linear_ncon(CHART3, A3, [["x1", "0"], ["1", "x1*x2"], ["0", "sin(x2)"]])
        dm = const_dmetric(CHART3, np.eye(2), H3, ncon)
        L0 = cc.solve_auxf1_linear(H3, ncon)
        pts = halton_box(BOX3, 20, seed=6)
        # the canonical d-connection of this d-metric is the constant one
        canon = cn.canonical_dconnection(dm)
        const = L0.as_dconnection(CHART3)
        assert residual_stats([sub(canon.full, const.full)], CHART3, pts)[0] < 1e-12
        # frame-derivative curvature equals the algebraic commutator, and is constant
        full = cv.dcurvature(canon, anholonomy(ncon)).full
        expected = cc.const_full_curvature(np.eye(2), L0)
        assert np.max(np.abs(expected)) > 1e-2
        assert residual_stats([sub(full, expected)], CHART3, pts)[0] < 1e-12
        assert cc.constancy_variance(full, CHART3, pts)[0] < 1e-12
        ricci = cv.dricci(cv.dcurvature(canon, anholonomy(ncon)))
        assert cc.constancy_variance(ricci.components, CHART3, pts)[0] < 1e-12

    def test_scalar_constant(self):
        ncon = linear_ncon(CHART3, A3)
        dm = const_dmetric(CHART3, np.eye(2), H3, ncon)
        canon = cn.canonical_dconnection(dm)
        scal = cv.dscalar(dm, cv.dricci(cv.dcurvature(canon, anholonomy(ncon))))
        pts = halton_box(BOX3, 20, seed=7)
        vals = evaluate(scal, CHART3, pts)
        L0 = cc.solve_auxf1_linear(H3, ncon)
        assert np.ptp(vals) < 1e-12
        assert vals[0] == pytest.approx(cc.const_scalar(cc.ConstDMetric(np.eye(2), H3), L0), abs=1e-12)

    def test_scalar_of_zero_connection(self):
        assert cc.const_scalar(cc.ConstDMetric(np.eye(2), np.eye(2)), np.zeros((2, 2, 2))) == 0.0


class TestPipelineConstancy:
    def test_catalog_scenario(self):
        rep = run_check(load_scenario("catalog:constcoeff-linear"))
        for key in ("auxf1", "const_match", "constancy_curvature", "constancy_scalar", "const_curvature"):
            assert rep[key].verdict == "PASS", key
        assert rep["lc_scalar_variance"].verdict == "INFO"
        assert rep["lc_scalar_variance"].max_residual > 1e-6

    @pytest.mark.parametrize("check", ["auxf1", "constancy_curvature", "constancy_scalar", "const_curvature"])
    def test_corrupted_setup_fails(self, check):
        rep = run_check(load_scenario("catalog:constcoeff-linear"), negative_control=check)
        assert rep[check].verdict == "FAIL"


class TestTable:
    def test_euclidean(self):
        table = run_compare(load_scenario("catalog:euclidean")).data["table"]
        for col in ("levi_civita", "normal_d_connection"):
            assert all(v == 0.0 for k, v in table[col].items() if k != "frame"), col
        assert table["constant_coefficients"] == "not applicable"

    def test_exp_lagrange(self):
        rep = run_compare(load_scenario("catalog:exp-lagrange"))
        table = rep.data["table"]
        assert table["levi_civita"]["max_coefficient"] > 0
        assert table["normal_d_connection"]["max_coefficient"] > 0
        assert table["constant_coefficients"] == "not applicable"
        assert rep.passed

    def test_constcoeff(self):
        rep = run_compare(load_scenario("catalog:constcoeff-linear"))
        table = rep.data["table"]
        assert table["constant_coefficients"]["max_curvature"] == 0.0
        assert table["levi_civita"]["max_curvature"] > 1e-2
        assert table["constant_coefficients"]["max_coefficient"] > 0
        assert rep.passed
