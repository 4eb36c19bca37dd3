import contextlib
import csv
import io
import json
import math
from pathlib import Path

import pytest

from toeplitz_kms import cli
from toeplitz_kms.config import SCHEMA, ConfigError, ProblemConfig

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def base_config(**extra):
    data = {"n": 2, "theta": [{"i": 1, "j": 2, "rational": "1/2"}], "r": ["1", "0"], "beta": [1.0],
            "elements": [{"id": "I", "preset": "identity"}]}
    data.update(extra)
    return data


@pytest.mark.parametrize("name", ["example_matrix.json", "half_block.json"])
def test_shipped_configs_parse_and_round_trip(name):
    cfg = ProblemConfig.from_json(json.loads((CONFIGS / name).read_text()))
    assert ProblemConfig.from_json(cfg.to_json()) == cfg


def test_schema_document_is_current():
    assert json.loads((ROOT / "docs" / "config_schema.json").read_text()) == SCHEMA
    code, out, _ = run("schema")
    assert code == 0 and json.loads(out) == SCHEMA


def test_analyze_example_matrix():
    code, out, _ = run("analyze", "--config", CONFIGS / "example_matrix.json")
    assert code == 0
    report = json.loads(out)
    assert (report["n"], report["k"], report["d"]) == (4, 2, 2)
    assert report["theta_d"]["m"] == 0
    assert report["theta_full"]["m"] == 2
    inv = report["invariant_lattice"]
    assert inv["m"] == 1
    gen = [inv["P"][0][i] * inv["a"][0] for i in range(4)]
    assert gen in ([1, -1, 0, 0], [-1, 1, 0, 0])
    for key in ("theta_d", "theta_full", "invariant_lattice"):
        assert report[key]["box_check"]["disagreements"] == 0


def test_analyze_integer_and_zero_matrices(tmp_path):
    for theta in ([{"i": 1, "j": 2, "rational": "3"}, {"i": 2, "j": 3, "rational": "-1"}], []):
        path = write_config(tmp_path, {"n": 3, "theta": theta, "r": ["0", "0", "0"]})
        code, out, _ = run("analyze", "--config", path)
        report = json.loads(out)
        assert code == 0
        assert report["theta_d"]["m"] == 3 and report["theta_d"]["a"] == [1, 1, 1]


def test_analyze_float_r_skips_invariant_lattice(tmp_path):
    path = write_config(tmp_path, base_config(r=[1.5, 0.0]))
    code, out, _ = run("analyze", "--config", path)
    assert code == 0 and json.loads(out)["invariant_lattice"] is None


def _results(out):
    return {(row["element_id"], row["beta"]): complex(row["re"], row["im"]) for row in json.loads(out)["results"]}


def test_eval_defect_projection_half_block():
    code, out, _ = run("eval", "--config", CONFIGS / "half_block.json")
    assert code == 0
    values = _results(out)
    assert values[("Q", math.log(2))] == pytest.approx(0.5, abs=1e-15)
    for beta in (math.log(2), 1.0, 3.0):
        assert values[("identity", beta)] == pytest.approx(1, abs=1e-15)
        assert values[("Q", beta)] == pytest.approx(-math.expm1(-beta), abs=1e-15)


def test_eval_series_method_agrees_with_closed_form(tmp_path):
    data = json.loads((CONFIGS / "half_block.json").read_text())
    data.update(method="series", cutoff=30, beta=[2.0])
    code, out, _ = run("eval", "--config", write_config(tmp_path, data, "series.json"))
    assert code == 0
    rows = json.loads(out)["results"]
    assert all(row["method"] == "series" and row["tail_bound"] is not None for row in rows)
    data["method"] = "closed-form"
    closed = _results(run("eval", "--config", write_config(tmp_path, data, "closed.json"))[1])
    for row in rows:
        gap = abs(complex(row["re"], row["im"]) - closed[(row["element_id"], 2.0)])
        assert gap <= row["tail_bound"] + 1e-12


@pytest.mark.parametrize("family", ["kms", "ground", "kms0plus", "kms0"])
def test_identity_has_value_one_in_every_family(family):
    code, out, _ = run("eval", "--config", CONFIGS / "half_block.json", "--family", family)
    assert code == 0
    for (name, _), value in _results(out).items():
        if name == "identity":
            assert value == pytest.approx(1, abs=1e-15)


def test_ground_kills_off_corner_monomials():
    code, out, _ = run("eval", "--config", CONFIGS / "half_block.json", "--family", "ground")
    values = _results(out)
    assert values[("range_e1", None)] == 0
    assert values[("Q", None)] == 1


def test_kms0_on_example_matrix():
    code, out, _ = run("eval", "--config", CONFIGS / "example_matrix.json", "--family", "kms0")
    assert code == 0
    z = complex(math.cos(math.pi / 2), math.sin(math.pi / 2))
    assert _results(out)[("L1_L2adj", None)] == pytest.approx(z, abs=1e-12)


def test_kms0plus_on_example_matrix():
    code, out, _ = run("eval", "--config", CONFIGS / "example_matrix.json", "--family", "kms0plus")
    assert code == 0
    assert _results(out)[("L1_L2adj", None)] == 0


def test_scan_csv_and_rerun_is_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("scan", "--config", CONFIGS / "half_block.json", "--out", first)[0] == 0
    assert run("scan", "--config", CONFIGS / "half_block.json", "--out", second)[0] == 0
    assert first.read_bytes() == second.read_bytes()
    rows = list(csv.DictReader(first.read_text().splitlines()))
    assert list(rows[0]) == ["beta", "element_id", "re", "im", "method", "tail_bound"]
    assert len(rows) == 3 * 5
    for row in rows:
        beta = float(row["beta"])
        if row["element_id"] == "identity":
            assert float(row["re"]) == 1.0 and float(row["im"]) == 0.0
        if row["element_id"] == "Q":
            assert float(row["re"]) == pytest.approx(-math.expm1(-beta), abs=1e-15)
        assert row["tail_bound"] == ""


def test_verify_single_suite_deterministic():
    runs = [run("verify", "--suite", "cocycle", "--seed", 3, "--trials", 50) for _ in range(2)]
    assert runs[0] == runs[1]
    code, out, _ = runs[0]
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["seed"] == 3
    assert [s["suite"] for s in report["suites"]] == ["cocycle"]


def test_verify_all_small(tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run("verify", "--suite", "all", "--seed", 1, "--trials", 5, "--cutoff", 20, "--out", path)
    report = json.loads(path.read_text())
    assert code == 0 and report["passed"]
    assert {s["suite"] for s in report["suites"]} == {"cocycle", "wick-oracle", "lattice-box", "kms-residual",
                                                      "euler-series"}


def test_verify_failure_exit_code(monkeypatch):
    def failing(seed, trials):
        return {"suite": "cocycle", "passed": False}

    monkeypatch.setitem(cli.SUITES, "cocycle", (failing, 1))
    code, out, _ = run("verify", "--suite", "cocycle")
    assert code == 1 and not json.loads(out)["passed"]


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("theta"),
    lambda d: d.update(n=0),
    lambda d: d.update(theta=[{"i": 2, "j": 1, "rational": "1"}]),
    lambda d: d.update(theta=[{"i": 1, "j": 3, "rational": "1"}]),
    lambda d: d.update(theta=[{"i": 1, "j": 2, "rational": "1/0"}]),
    lambda d: d.update(theta=[{"i": 1, "j": 2, "rational": "1"}, {"i": 1, "j": 2, "rational": "2"}]),
    lambda d: d.update(theta=[{"i": 1, "j": 2, "symbols": {"s": "1"}}]),
    lambda d: d.update(r=["1"]),
    lambda d: d.update(beta=[0]),
    lambda d: d.update(elements=[{"id": "x", "terms": [{"p": [1], "q": [0, 0]}]}]),
    lambda d: d.update(elements=[{"id": "x", "preset": "identity"}, {"id": "x", "preset": "identity"}]),
    lambda d: d.update(extra=1),
])
def test_malformed_configs_exit_2(tmp_path, mutate):
    data = base_config()
    mutate(data)
    code, _, err = run("eval", "--config", write_config(tmp_path, data))
    assert code == 2 and err.startswith("error:")


def test_unreadable_config_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("analyze", "--config", bad)[0] == 2
    assert run("analyze", "--config", tmp_path / "missing.json")[0] == 2
    assert run("analyze")[0] == 2


@pytest.mark.parametrize("extra", [
    {"r": ["-1", "0"]},
    {"family": "kms0", "r": [1.5, 0.0]},
    {"measure": [{"weight": 1.0, "angles": [0.1, 0.2, 0.3]}]},
    {"beta": []},
])
def test_precondition_failures_exit_3(tmp_path, extra):
    code, _, err = run("eval", "--config", write_config(tmp_path, base_config(**extra)))
    assert code == 3 and err.startswith("error:")


def test_missing_symbol_binding_is_a_config_error():
    with pytest.raises(ConfigError):
        ProblemConfig.from_json(base_config(theta=[{"i": 1, "j": 2, "symbols": {"s": "1"}}])).theta_matrix()
