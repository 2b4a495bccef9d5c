import json
import math
import subprocess
import sys

import numpy as np
import pytest

from vnr import io
from vnr.cli import main
from vnr.distributions import Distribution, ScenarioSpace
from vnr.risk import LambdaFn


def run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "vnr.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )
    return proc


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
        return str(p)

    put("uniform.json", {"kind": "piecewise_cdf",
                         "nodes": [[-0.5, 0.0, "jump"], [0.5, 1.0, "linear"]]})
    put("two_state.json", {"states": ["s1", "s2"],
                           "measures": {"Q": [0.5, 0.5]},
                           "variables": {"X": [0.0, 4.0]}})
    put("twoatom.json", {"kind": "atoms", "atoms": [[0.0, 0.5], [1.0, 0.5]]})
    put("lam.json", {"breakpoints": [], "left_value": 0.1})
    put("cone.json", {"scenario": {"states": ["a", "b", "c"],
                                   "measures": {"Q": [0.4, 0.3, 0.3]},
                                   "variables": {"X": [1.0, 2.0, 3.0]}},
                      "linear": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})
    put("ms.json", {"scenario": "two_state.json",
                    "measure_names": ["Q"],
                    "model_risk": {"Q": {"X": 0.25}}})
    put("claims.json", {"ramps": [[0.0, 0.5], [2.0, 0.5], [4.0, 0.5]]})
    paths["dir"] = str(tmp_path)
    return paths


class TestSchemas:
    def test_distribution_round_trip(self):
        d = Distribution.uniform(-0.5, 0.5)
        back = io.distribution_from_dict(io.distribution_to_dict(d))
        assert back.same_nodes(d)
        atoms = Distribution.from_atoms([(0.0, 0.25), (1.5, 0.75)])
        back = io.distribution_from_dict(io.distribution_to_dict(atoms))
        assert back.same_nodes(atoms)

    def test_scenario_round_trip(self):
        s = ScenarioSpace(("a", "b"), {"Q": (0.3, 0.7)}, {"X": (1.0, -1.0)})
        assert io.scenario_from_dict(io.scenario_to_dict(s)) == s

    def test_lambda_round_trip(self):
        lam = LambdaFn.from_breakpoints([(0.0, 0.2, "step"), (1.0, 0.4, "linear")], 0.05)
        back = io.lambda_fn_from_dict(io.lambda_fn_to_dict(lam))
        for x in np.linspace(-1, 2, 13):
            assert back(float(x)) == lam(float(x))

    def test_invalid_distribution_reports_field(self):
        with pytest.raises(io.InputError):
            io.distribution_from_dict({"kind": "atoms"})
        with pytest.raises(io.InputError):
            io.distribution_from_dict({"kind": "spline", "nodes": []})

    def test_value_sentinels(self):
        assert io.encode_value(math.inf) == "+inf"
        assert io.encode_value(-math.inf) == "-inf"
        assert io.encode_value(0.5) == 0.5
        text = io.dumps_report({"value": math.inf, "x": 1 / 3})
        parsed = json.loads(text)
        assert parsed["value"] == "+inf"
        assert abs(parsed["x"] - 1 / 3) < 1e-11

    def test_report_rejects_nan(self):
        with pytest.raises(ValueError):
            io.dumps_report({"x": math.nan})


class TestCli:
    def test_risk_var_paper_value(self, files, capsys):
        assert main(["risk", "--measure", "var", "--lambda", "0.01",
                     "--dist", files["uniform.json"]]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["value"] == pytest.approx(0.49)

    def test_risk_level_flag_alias(self, files, capsys):
        assert main(["risk", "--measure", "var", "--risk-level", "0.01",
                     "--dist", files["uniform.json"]]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.49)

    def test_vr_call_p3(self, files, capsys):
        assert main(["vr", "--family", "call", "--scenario", files["two_state.json"],
                     "--measure", "Q", "--variable", "X", "--price", "2"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(0.0, abs=1e-9)

    def test_vr_minus_inf_sentinel(self, files, tmp_path, capsys):
        neg = tmp_path / "neg.json"
        neg.write_text(json.dumps({"states": ["a", "b"],
                                   "measures": {"Q": [0.5, 0.5]},
                                   "variables": {"X": [-4.0, 0.0]}}))
        assert main(["vr", "--family", "call", "--scenario", str(neg),
                     "--measure", "Q", "--variable", "X", "--price", "-2"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == "-inf"

    def test_missing_file_exit_code(self, files, capsys):
        assert main(["risk", "--measure", "var", "--risk-level", "0.1",
                     "--dist", "nope.json"]) == 1

    def test_malformed_json_diagnostic(self, files, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["risk", "--measure", "var", "--risk-level", "0.1",
                     "--dist", str(bad)]) == 1
        err = capsys.readouterr().err
        assert "line" in err

    def test_axioms_pass_and_fail_exit_codes(self, files, tmp_path, capsys):
        out = tmp_path / "rep.json"
        code = main(["axioms", "--target", "call-family", "--cases", "40",
                     "--seed", "7", "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert all(r["failures"] == 0 for r in rep["axioms"])
        code = main(["axioms", "--target", "var-control", "--cases", "500",
                     "--seed", "7", "--risk-level", "0.25"])
        assert code == 2

    def test_duality_report(self, files, tmp_path):
        out = tmp_path / "duality.json"
        code = main(["duality", "--cone", files["cone.json"], "--phi", "min",
                     "--resolution", "2", "--cases", "20", "--seed", "3",
                     "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["max_gap"] <= 1e-9
        assert rep["weak_violations"] == 0

    def test_propvolle_report(self, files, capsys):
        assert main(["propvolle", "--dist", files["twoatom.json"],
                     "--lambda-fn", files["lam.json"], "--grid", "100"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["lower_bound"] <= rep["lambda_var"] + 1e-9
        assert rep["gap"] >= 0

    def test_model_risk_report(self, files, capsys):
        assert main(["model-risk", "--model-set", files["ms.json"],
                     "--variable", "X", "--measure", "Q",
                     "--claims", files["claims.json"]]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["cont_spread"] == 0.0
        assert rep["alpha_k"] == 0.25

    def test_price_curve_monotone_and_reingestible(self, files, tmp_path):
        out = tmp_path / "curve.csv"
        assert main(["price-curve", "--family", "call",
                     "--scenario", files["two_state.json"], "--measure", "Q",
                     "--variable", "X", "--kind", "r", "--grid", "-1:4:11",
                     "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "p,r_measure"
        vals = []
        for line in lines[1:]:
            _, v = line.split(",")
            vals.append(-math.inf if v == "-inf" else float(v))
        assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))

    def test_byte_identical_reports(self, files, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["axioms", "--target", "exp-concave-family", "--cases", "25",
                "--seed", "13"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_threads_flag_never_changes_results(self, files, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        base = ["vr", "--family", "exp-concave", "--scenario", files["two_state.json"],
                "--measure", "Q", "--variable", "X", "--price", "1.0"]
        assert main(["--threads", "1"] + base + ["--out", str(a)]) == 0
        assert main(["--threads", "8"] + base + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_subprocess_entry_point(self, files):
        proc = run_cli(["risk", "--measure", "worst-case",
                        "--dist", files["twoatom.json"]], files["dir"])
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["value"] == pytest.approx(0.0)
