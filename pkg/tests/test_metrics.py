"""d-metrics, coordinate assembly and pointwise frame matching."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from akgrav.arrays import to_array
from akgrav.errors import DegenerateMetric, NoConvergence, SignatureMismatch
from akgrav.expr import ONE, ZERO, evaluate_array, parse
from akgrav.frames import NConnection
from akgrav.metrics import (
    DMetric,
    assemble_coordinate_metric,
    dmetric_from_coordinate,
    extract_nconnection,
    frame_match_solve,
    lagrange_dmetric,
    sqrtm_newton,
)

from .conftest import max_abs


def const_dmetric(chart, g, h, N=None):
    g = to_array([[parse(repr(float(v)), chart) for v in row] for row in g])
    h = to_array([[parse(repr(float(v)), chart) for v in row] for row in h])
    ncon = NConnection.zero(chart) if N is None else NConnection(chart, to_array(N))
    return DMetric(chart, g, h, ncon)


class TestLagrangeDMetric:
    def test_euclidean(self, chart):
        dm = lagrange_dmetric(parse("y3^2+y4^2", chart), chart)
        assert dm.g[0, 0] is ONE and dm.g[0, 1] is ZERO and dm.h[1, 1] is ONE
        assert dm.ncon.is_zero()

    def test_exp_lagrange(self, chart, exp_L):
        dm = lagrange_dmetric(exp_L, chart)
        e = parse("exp(x1)", chart)
        assert dm.g[0, 0] is e and dm.h[1, 1] is e and dm.g[0, 1] is ZERO
        assert dm.ncon.N[0, 0] is parse("0.5*y3", chart)

    def test_pseudo_signature(self, chart):
        dm = lagrange_dmetric(parse("-y3^2 + y4^2", chart), chart)
        vals = evaluate_array(dm.g, chart, np.zeros((1, 4)))[0]
        assert vals == pytest.approx(np.diag([-1.0, 1.0]))

    def test_asymmetric_block_rejected(self, chart):
        with pytest.raises(ValueError):
            DMetric(chart, to_array([[ONE, ONE], [ZERO, ONE]]), to_array([[ONE, ZERO], [ZERO, ONE]]),
                    NConnection.zero(chart))


class TestAssembly:
    def test_block_diagonal(self, chart):
        dm = const_dmetric(chart, [[1, 0], [0, 2]], [[3, 0], [0, 4]])
        G = evaluate_array(assemble_coordinate_metric(dm), chart, np.zeros((1, 4)))[0]
        assert G == pytest.approx(np.diag([1.0, 2.0, 3.0, 4.0]))

    def test_single_n_entry(self, chart):
        N = [[ONE, ZERO], [ZERO, ZERO]]
        dm = const_dmetric(chart, np.eye(2), np.eye(2), N)
        G = evaluate_array(assemble_coordinate_metric(dm), chart, np.zeros((1, 4)))[0]
        assert G[0, 2] == 1.0 and G[2, 0] == 1.0 and G[0, 0] == 2.0
        assert extract_nconnection(assemble_coordinate_metric(dm), chart).N[0, 0] is ONE

    def test_block_diagonal_extracts_zero(self, chart):
        dm = const_dmetric(chart, np.eye(2), np.eye(2))
        assert extract_nconnection(assemble_coordinate_metric(dm), chart).is_zero()

    def test_schwarzschild_diagonal(self):
        from akgrav.scenario import load_scenario

        sc = load_scenario("catalog:schwarzschild")
        dm = DMetric(sc.chart, sc.g, sc.h, NConnection(sc.chart, sc.N))
        G = assemble_coordinate_metric(dm)
        assert extract_nconnection(G, sc.chart).is_zero()

    def test_symmetric(self, chart, exp_L):
        G = assemble_coordinate_metric(lagrange_dmetric(exp_L, chart))
        assert all(G[i, j] is G[j, i] for i in range(4) for j in range(4))


_coef = st.floats(-1.0, 1.0, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def random_dmetrics(draw):
    """Smooth polynomial blocks; the v-block is kept diagonally dominant."""
    from akgrav.expr import Chart

    chart = Chart()
    x1, x2, y3, y4 = (chart.var(i) for i in range(4))
    monomials = [ONE, x1, x2, y3, y4, x1 * y3, y4 * y4]

    def poly():
        return sum((draw(_coef) * mono for mono in monomials), ZERO)

    g12 = 0.2 * poly()
    g = to_array([[3 + 0.2 * poly(), g12], [g12, 3 + 0.2 * poly()]])
    h12 = 0.1 * poly()
    h = to_array([[4 + 0.1 * poly(), h12], [h12, 4 + 0.1 * poly()]])
    N = to_array([[poly() for _ in range(2)] for _ in range(2)])
    return DMetric(chart, g, h, NConnection(chart, N))


class TestRoundTrip:
    @settings(max_examples=25, deadline=None)
    @given(random_dmetrics())
    def test_assemble_extract(self, dm):
        pts = np.array([[0.1, -0.4, 0.7, -0.9], [0.8, 0.3, -0.5, 0.2], [-0.6, 0.9, 0.4, 0.6]])
        back = dmetric_from_coordinate(assemble_coordinate_metric(dm), dm.chart)
        for a, b in ((dm.ncon.N, back.ncon.N), (dm.g, back.g), (dm.h, back.h)):
            assert max_abs(evaluate_array(a, dm.chart, pts) - evaluate_array(b, dm.chart, pts)) < 1e-10


class TestFrameMatch:
    def test_identity(self, chart, exp_L):
        dm = lagrange_dmetric(exp_L, chart)
        vb = frame_match_solve(dm, dm, (0.2, 0.1, 0.5, 0.7))
        assert vb.e == pytest.approx(np.eye(4), abs=1e-12)

    def test_scaling(self, chart):
        src = const_dmetric(chart, [[2, 0.3], [0.3, 1]], [[1.5, 0.2], [0.2, 3]])
        tgt = const_dmetric(chart, np.array([[2, 0.3], [0.3, 1]]) * 4, np.array([[1.5, 0.2], [0.2, 3]]) * 4)
        vb = frame_match_solve(tgt, src, (0, 0, 0, 0))
        assert vb.residual < 1e-9
        assert vb.e == pytest.approx(0.5 * np.eye(4), abs=1e-12)

    def test_euclidean_target(self, chart, exp_L):
        tgt = const_dmetric(chart, np.eye(2), np.eye(2))
        src = lagrange_dmetric(exp_L, chart)
        vb = frame_match_solve(tgt, src, (math.log(4.0), 0.0, 1.0, 2.0))
        assert vb.residual < 1e-9
        assert vb.e == pytest.approx(2.0 * np.eye(4), abs=1e-12)
        # induced primed N-connection: e_v N e_h^-1 = N here
        assert vb.N_primed == pytest.approx(np.array([[0.5, -1.0], [1.0, 0.5]]))

    def test_indefinite(self, chart):
        src = const_dmetric(chart, [[-1, 0.2], [0.2, 2]], [[1, 0.5], [0.5, -3]])
        tgt = const_dmetric(chart, [[-1, 0], [0, 1]], [[1, 0], [0, -1]])
        vb = frame_match_solve(tgt, src, (0, 0, 0, 0))
        assert vb.residual < 1e-9

    def test_signature_mismatch(self, chart):
        src = const_dmetric(chart, np.eye(2), np.eye(2))
        tgt = const_dmetric(chart, [[-1, 0], [0, 1]], np.eye(2))
        with pytest.raises(SignatureMismatch):
            frame_match_solve(tgt, src, (0, 0, 0, 0))

    def test_degenerate(self, chart):
        src = const_dmetric(chart, np.eye(2), np.eye(2))
        tgt = const_dmetric(chart, [[1, 1], [1, 1]], np.eye(2))
        with pytest.raises(DegenerateMetric):
            frame_match_solve(tgt, src, (0, 0, 0, 0))


class TestSqrtm:
    def test_square_root(self):
        A = np.array([[4.0, 1.0], [1.0, 3.0]])
        R, it = sqrtm_newton(A)
        assert R @ R == pytest.approx(A, abs=1e-13)
        assert it < 20

    def test_no_convergence(self):
        with pytest.raises(NoConvergence):
            sqrtm_newton(np.array([[1e6, 0.0], [0.0, 1e-6]]), max_iter=2)
