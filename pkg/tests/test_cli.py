"""Scenario files, the command line contract and report determinism."""

from pathlib import Path

import numpy as np
import pytest

from akgrav.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from akgrav.errors import ScenarioError
from akgrav.expr import evaluate, parse
from akgrav.report import extract_machine_readable
from akgrav.scenario import catalog_names, load_scenario, parse_scenario

GOLDEN = Path(__file__).parent / "golden"

BLOCKS = """
[scenario]
name = warped
points = 12
seed = 4

[source]
type = metric_blocks
g_11 = 1
g_22 = 1 + x1^2
h_11 = exp(x2)
h_22 = 2
N_12 = x1*y3      ; N^3_2

[domain]
x1 = -1, 1
x2 = -1, 1
y3 = -1, 1
y4 = -1, 1
"""


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_stamp(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# generated:"))


class TestScenarioFiles:
    def test_metric_blocks(self):
        sc = parse_scenario(BLOCKS)
        assert sc.name == "warped" and sc.num_points == 12 and sc.seed == 4
        assert sc.N[0][1] is parse("x1*y3", sc.chart)
        assert sc.N[1][0] is parse("0", sc.chart)
        assert sc.h[0][0] is parse("exp(x2)", sc.chart)

    def test_symmetric_partner_filled(self):
        sc = parse_scenario(BLOCKS.replace("h_22 = 2", "h_22 = 2\nh_12 = 0.5"))
        assert sc.h[1][0] is sc.h[0][1]

    def test_conflicting_partner(self):
        with pytest.raises(ScenarioError):
            parse_scenario(BLOCKS.replace("h_22 = 2", "h_22 = 2\nh_12 = 0.5\nh_21 = 0.7"))

    @pytest.mark.parametrize("edit", [
        ("type = metric_blocks", "type = tetrad"),
        ("x1 = -1, 1", "x1 = 1, -1"),
        ("y4 = -1, 1", ""),
        ("points = 12", "points = 0"),
        ("g_22 = 1 + x1^2", "g_22 = 1 + "),
        ("g_22 = 1 + x1^2", "g_33 = 1"),
        ("[domain]", "[box]"),
    ])
    def test_invalid(self, edit):
        with pytest.raises(ScenarioError):
            parse_scenario(BLOCKS.replace(*edit))

    def test_generating_function_needs_pairing(self):
        text = BLOCKS.replace("type = metric_blocks", "type = generating_function\nL = y3^2").replace(
            "name = warped", "name = w\nv_coords = y3")
        with pytest.raises(ScenarioError):
            parse_scenario(text)

    def test_catalog(self):
        assert catalog_names() == ["euclidean", "exp-lagrange", "schwarzschild", "sphere-v", "constcoeff-linear"]
        with pytest.raises(ScenarioError):
            load_scenario("catalog:kerr")


class TestExitCodes:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "check", "catalog:euclidean")
        assert code == EXIT_OK and "overall: PASS" in out

    def test_negative_control(self, capsys):
        code, out, _ = run(capsys, "check", "catalog:exp-lagrange", "--negative-control", "deflc")
        assert code == EXIT_FAIL
        assert any(l.startswith("FAIL  deflc") for l in out.splitlines())

    def test_file_scenario(self, capsys, tmp_path):
        path = tmp_path / "warped.ini"
        path.write_text(BLOCKS)
        code, out, _ = run(capsys, "check", str(path))
        assert code == EXIT_OK, out

    @pytest.mark.parametrize("argv", [
        ("check", "catalog:kerr"),
        ("check", "catalog:euclidean", "--tol", "nonsense=1e-3"),
        ("check", "catalog:euclidean", "--points", "0"),
        ("derive", "/nonexistent/scenario.ini"),
    ])
    def test_input_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_INPUT and err

    @pytest.mark.parametrize("argv", [
        (),
        ("frobnicate",),
        ("check", "catalog:euclidean", "--tol", "deflc"),
        ("check", "catalog:euclidean", "--points", "many"),
    ])
    def test_usage_errors(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(list(argv))
        assert exc.value.code == EXIT_INPUT

    def test_bad_scenario_file(self, capsys, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(BLOCKS.replace("type = metric_blocks", "type = nothing"))
        assert run(capsys, "check", str(path))[0] == EXIT_INPUT

    def test_tolerance_override_can_fail(self, capsys):
        # exp-lagrange has fd_probes residual well above zero
        code, out, _ = run(capsys, "check", "catalog:exp-lagrange", "--tol", "fd_probes=1e-30")
        assert code == EXIT_FAIL and "FAIL  fd_probes" in out

    def test_catalog_list(self, capsys):
        code, out, _ = run(capsys, "catalog", "list")
        assert code == EXIT_OK
        assert out.split() == [f"catalog:{n}" for n in catalog_names()]

    def test_out_file(self, capsys, tmp_path):
        dest = tmp_path / "report.txt"
        code, out, _ = run(capsys, "compare", "catalog:constcoeff-linear", "--out", str(dest))
        assert code == EXIT_OK and out == ""
        assert "[machine-readable]" in dest.read_text()


class TestDeterminism:
    @pytest.mark.parametrize("name", ["exp-lagrange", "sphere-v"])
    def test_check_machine_readable(self, capsys, name):
        _, first, _ = run(capsys, "check", f"catalog:{name}", "--seed", "11", "--points", "15")
        _, second, _ = run(capsys, "check", f"catalog:{name}", "--seed", "11", "--points", "15")
        assert extract_machine_readable(first) == extract_machine_readable(second)

    def test_seed_changes_samples(self, capsys):
        _, a, _ = run(capsys, "check", "catalog:exp-lagrange", "--seed", "1", "--points", "10")
        _, b, _ = run(capsys, "check", "catalog:exp-lagrange", "--seed", "2", "--points", "10")
        assert extract_machine_readable(a) != extract_machine_readable(b)

    def test_timestamp_only_in_metadata(self, capsys):
        _, out, _ = run(capsys, "check", "catalog:euclidean")
        assert "generated" not in extract_machine_readable(out)
        assert any(l.startswith("# generated:") for l in out.splitlines())


class TestDerive:
    @pytest.mark.parametrize("name", ["euclidean", "exp-lagrange"])
    def test_golden(self, capsys, name):
        code, out, _ = run(capsys, "derive", f"catalog:{name}")
        assert code == EXIT_OK
        assert strip_stamp(out) == strip_stamp((GOLDEN / f"derive_{name}.txt").read_text())

    def test_euclidean_all_zero(self, capsys):
        _, out, _ = run(capsys, "derive", "catalog:euclidean")
        sections = out.split("\n[")
        for obj in ("N]", "Omega]", "Gamma]", "T]", "R]", "Ricci]", "Z]", "LC_Ricci]"):
            body = next(s for s in sections if s.startswith(obj))
            assert "all components zero" in body, obj

    def test_exp_lagrange_n_values(self, capsys):
        _, out, _ = run(capsys, "derive", "catalog:exp-lagrange")
        sc = load_scenario("catalog:exp-lagrange")
        N = np.zeros((2, 2))
        for line in out.splitlines():
            if line.startswith("N["):
                lhs, rhs = line.split(" = ", 1)
                a, i = (int(s) for s in lhs[2:-1].split(","))
                N[a, i] = evaluate(parse(rhs.split(";")[0], sc.chart), sc.chart, np.array([[0, 0, 1.0, 2.0]]))[0]
        assert N == pytest.approx(np.array([[0.5, -1.0], [1.0, 0.5]]), abs=1e-15)

    def test_schwarzschild_lc_ricci(self, capsys):
        _, out, _ = run(capsys, "derive", "catalog:schwarzschild")
        body = out.split("\n[LC_Ricci]")[1].split("\n[")[0]
        vals = [abs(float(l.rsplit(":", 1)[1])) for l in body.splitlines() if "; at p0:" in l]
        assert all(v < 1e-8 for v in vals)
