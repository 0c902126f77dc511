import csv
import json

import pytest

from signedud import PLJFunction, ValidationError, io
from signedud.cli import RunConfig, main, parse_count, parse_probes


def write(tmp_path, name, obj):
    return str(io.save_json(tmp_path / name, obj))


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def tent_doc():
    return io.to_document(PLJFunction.polygon([0.0, 0.5, 1.0], [0.0, 0.5, 0.0]))


def diagnostics(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    return json.loads(err[0])


def test_gen_finite_halves(tmp_path):
    m = write(tmp_path, "m.json", {"atoms": [{"x": "a", "w": 0.5}, {"x": "b", "w": 0.5}]})
    out = tmp_path / "seq.csv"
    assert main(["gen-finite", "--measure", m, "--n", "4", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [r["atom_label"] for r in rows] == ["a", "b", "a", "b"]
    assert all(float(r["running_subset_discrepancy"]) <= 1 / int(r["step"]) for r in rows)


def test_verify_finite_suite(tmp_path):
    out = tmp_path / "summary.json"
    assert main(["verify", "--suite", "lemma1", "--trials", "20", "--seed", "7", "--out", str(out)]) == 0
    s = io.load_json(out)
    assert s["passed"] and s["checks"][0]["worst"] <= 1.0


def test_missing_input_is_io_error_without_output(tmp_path, capsys):
    out = tmp_path / "seq.csv"
    code = main(["gen-finite", "--measure", str(tmp_path / "nope.json"), "--n", "4", "--out", str(out)])
    assert code == 4 and not out.exists()
    assert diagnostics(capsys)["error"] == "io"


def test_validation_errors(tmp_path, capsys):
    bad = write(tmp_path, "m.json", {"atoms": [{"x": "a", "w": 0.7}, {"x": "b", "w": 0.7}]})
    out = tmp_path / "o.csv"
    assert main(["gen-finite", "--measure", bad, "--n", "4", "--out", str(out)]) == 2
    assert diagnostics(capsys)["error"] == "validation" and not out.exists()
    (tmp_path / "broken.json").write_text("{")
    assert main(["gen-bv", "--phi", str(tmp_path / "broken.json"), "--n", "3"]) == 2
    diagnostics(capsys)
    assert main(["gen-finite", "--measure", bad, "--n", "0"]) == 2
    assert main(["no-such-command"]) == 2


def test_gen_bv_and_discrepancy(tmp_path):
    phi = write(tmp_path, "phi.json", tent_doc())
    seq = tmp_path / "seq.csv"
    assert main(["gen-bv", "--phi", phi, "--n", "2000", "--out", str(seq)]) == 0
    rows = read_rows(seq)
    assert len(rows) == 2000 and set(r["eps"] for r in rows) == {"1", "-1"}
    out = tmp_path / "d.json"
    assert main(["discrepancy", "--seq", str(seq), "--target", phi, "--interval", "--out", str(out)]) == 0
    d = io.load_json(out)
    assert d["kind"] == "interval" and d["N"] == 2000 and 0 < d["discrepancy"] < 0.2


def test_gen_bv_normalize(tmp_path):
    tall = io.to_document(PLJFunction.polygon([0.0, 0.5, 1.0], [3.0, 4.0, 3.0]))
    phi = write(tmp_path, "phi.json", tall)
    assert main(["gen-bv", "--phi", phi, "--n", "10", "--method", "direct"]) == 2
    out = tmp_path / "s.csv"
    assert main(["gen-bv", "--phi", phi, "--n", "10", "--method", "direct", "--normalize", "--out", str(out)]) == 0


def test_sample_is_deterministic(tmp_path):
    phi = write(tmp_path, "phi.json", tent_doc())
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["sample", "--phi", phi, "--seed", "5", "--n", "1000", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_columns(tmp_path):
    phi = write(tmp_path, "phi.json", io.to_document(PLJFunction.linear()))
    out = tmp_path / "r.csv"
    args = ["report", "--phi", phi, "--n-grid", "1e2,1e3", "--probe-points", "0:1:0.25", "--method", "direct"]
    assert main(args + ["--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 2 * 2 * 5
    for r in rows:
        assert float(r["abs_error"]) <= float(r["bound"])


def test_merge_and_convex(tmp_path):
    plan = write(tmp_path, "plan.json", {"constants": [0, 0, 0], "lengths": [1, 2]})
    s1 = io.write_csv(tmp_path / "s1.csv", ["step", "x"], [[1, 0.5]])
    s2 = io.write_csv(tmp_path / "s2.csv", ["step", "x"], [[1, 0.25], [2, 0.75]])
    out = tmp_path / "m.csv"
    assert main(["merge", "--plan", plan, "--sources", f"{s1},{s2}", "--n", "3", "--out", str(out)]) == 0
    assert [(r["block"], r["value"]) for r in read_rows(out)] == [("1", "0.5"), ("2", "0.25"), ("2", "0.75")]
    assert main(["merge", "--plan", plan, "--sources", str(s1), "--n", "3"]) == 2
    pts = write(tmp_path, "p.json", [[1.0, 0.0], [0.0, 1.0]])
    w = write(tmp_path, "w.json", [0.5, 0.5])
    out = tmp_path / "c.csv"
    assert main(["convex", "--points", pts, "--weights", w, "--n", "50", "--out", str(out)]) == 0
    assert all(float(r["error"]) <= float(r["bound"]) for r in read_rows(out))


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SIGNEDUD_OUTPUT_DIR", str(tmp_path / "outdir"))
    phi = write(tmp_path, "phi.json", tent_doc())
    assert main(["sample", "--phi", phi, "--seed", "1", "--n", "5"]) == 0
    assert (tmp_path / "outdir" / "sample.csv").exists()


def test_config_file(tmp_path):
    phi = write(tmp_path, "phi.json", tent_doc())
    out = tmp_path / "s.csv"
    cfg = write(tmp_path, "cfg.json", {"subcommand": "sample", "inputs": {"phi": phi}, "n": 7, "seed": 2, "out": str(out)})
    assert main(["--config", cfg]) == 0 and len(read_rows(out)) == 7
    bad = write(tmp_path, "bad.json", {"subcommand": "sample", "colour": 1})
    assert main(["--config", bad]) == 2


def test_run_config_invariants():
    with pytest.raises(ValidationError):
        RunConfig("report", n_grid=[10, 10])
    with pytest.raises(ValidationError):
        RunConfig("sample", n=0)
    with pytest.raises(ValidationError):
        RunConfig("sample", tolerances={"cdf_tol": -1.0})
    assert parse_count("1e5") == 100000
    assert parse_probes("0:1:0.05") == [round(0.05 * i, 12) for i in range(21)]


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "gen-bv" in capsys.readouterr().out
