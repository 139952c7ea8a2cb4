import csv
import json
from pathlib import Path

import numpy as np
import pytest

from iwasawa import cli
from iwasawa.acstruct import J0, random_acs

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", ["J0", "J1"])
def test_classify_golden(capsys, name):
    code, out, _ = run(capsys, "classify", name)
    assert code == 0
    assert out == (GOLDEN / f"classify_{name}.json").read_text()


def test_classify_examples(capsys, tmp_path):
    d = json.loads(run(capsys, "classify", "J0")[1])
    assert d["integrable"] and d["component"] == "Cplus" and d["region"] == "origin" and d["h1"] == 6
    d = json.loads(run(capsys, "classify", "J1")[1])
    assert d["component"] == "Cminus" and d["in_C0_finite"] is False
    assert d["echelon"]["J0"] == "InfinityClass"
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"J": random_acs(np.random.default_rng(2)).tolist()}))
    code, out, _ = run(capsys, "classify", f)
    assert code == 0 and json.loads(out) == {"integrable": False}


def test_classify_echelon_input(capsys, tmp_path):
    f = tmp_path / "plus.json"
    f.write_text(json.dumps({"echelon_plus": {"a": [0.3, 0], "b": 0.2, "c": 0.1, "d": [0, 0.4]}}))
    d = json.loads(run(capsys, "classify", f)[1])
    assert d["component"] == "Cplus" and d["orbit_dimension"] == 2 and d["h1"] == 4
    assert np.isclose(d["echelon"]["J0"]["a"][0], 0.3)
    f.write_text(json.dumps({"echelon_minus": {"a": 0.2, "v": 0.1}}))
    d = json.loads(run(capsys, "classify", f)[1])
    assert d["component"] == "Cminus"


def test_classify_negative_orientation(capsys, tmp_path):
    f = tmp_path / "neg.json"
    f.write_text(json.dumps({"J": (-J0).tolist()}))
    d = json.loads(run(capsys, "classify", f)[1])
    assert d["component"] == "MinusCplus" and d["echelon"]["J0"] == "NotApplicable"


def test_parse_errors(capsys, tmp_path):
    assert run(capsys, "classify", tmp_path / "missing.json")[0] == 2
    f = tmp_path / "junk.json"
    f.write_text("{not json")
    code, _, err = run(capsys, "classify", f)
    assert code == 2 and "cannot read" in err
    f.write_text(json.dumps({"J": [[1, 2], [3, 4]]}))
    assert run(capsys, "classify", f)[0] == 2
    f.write_text(json.dumps({"J": np.eye(6).tolist()}))
    assert run(capsys, "classify", f)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2
    assert run(capsys, "verify", "--samples", "0")[0] == 2
    assert run(capsys, "verify", "--tol", "-1")[0] == 2
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_verify_default_and_determinism(capsys):
    code, out1, _ = run(capsys, "verify", "--samples", "40", "--seed", "3")
    assert code == 0
    _, out2, _ = run(capsys, "verify", "--samples", "40", "--seed", "3")
    assert out1 == out2
    lines = out1.strip().splitlines()
    assert len(lines) == 22 and lines[-1] == "20/20 suites passed"
    assert all("PASS" in line for line in lines[1:-1])


def test_verify_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "20", "--tol", "1e-15", "--suite", "polar-retraction")
    assert code == 1 and "FAIL" in out
    assert "0/1 suites passed" in out


def test_verify_formats(capsys, tmp_path):
    out = tmp_path / "v.json"
    assert run(capsys, "verify", "--samples", "20", "--suite", "jacobi", "--format", "json", "--out", out)[0] == 0
    rows = json.loads(out.read_text())
    assert rows[0]["name"] == "jacobi" and rows[0]["passed"]
    code, text, _ = run(capsys, "verify", "--samples", "20", "--suite", "jacobi", "--format", "csv")
    assert list(csv.DictReader(text.splitlines()))[0]["status"] == "PASS"


def test_region_map(capsys, tmp_path):
    out = tmp_path / "map.csv"
    code, _, _ = run(capsys, "region-map", "--samples", "1500", "--seed", "4", "--out", out, "--format", "svg")
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1500
    svg = out.with_suffix(".svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg
    for r in rows:
        lam = complex(float(r["lambda_re"]), float(r["lambda_im"]))
        mu = complex(float(r["mu_re"]), float(r["mu_im"]))
        prod = (lam * mu).real
        real = abs(lam.imag) < 1e-9 and abs(mu.imag) < 1e-9
        assert not (real and lam.real <= 0 and mu.real <= 0 and abs(lam - mu) > 1e-9)
        if r["component"] == "Cplus":
            assert -1e-12 <= prod < 1
        elif r["component"] == "Cminus":
            assert prod > 1
    first = out.read_text()
    run(capsys, "region-map", "--samples", "1500", "--seed", "4", "--out", out)
    assert out.read_text() == first


def test_region_map_png(capsys, tmp_path):
    out, fig = tmp_path / "m.csv", tmp_path / "m.png"
    assert run(capsys, "region-map", "--samples", "50", "--out", out, "--figure", fig)[0] == 0
    assert fig.read_bytes()[:4] == b"\x89PNG"


def test_region_map_unwritable(capsys, tmp_path):
    assert run(capsys, "region-map", "--samples", "10", "--out", tmp_path / "no" / "x.csv")[0] == 2


def test_retract_trace(capsys, tmp_path):
    out = tmp_path / "t.csv"
    assert run(capsys, "retract-trace", "--steps", "20", "--out", out, "--format", "svg")[0] == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 22 and len(rows[0]) == 37
    assert out.with_suffix(".svg").exists()
    data = np.array(rows[1:], dtype=float)
    from iwasawa.metricgeo import match_orthogonal

    assert match_orthogonal(data[-1, 1:].reshape(6, 6), tol=1e-9) == "Z"
    assert run(capsys, "retract-trace", "--kind", "polar", "--steps", "5", "--out", tmp_path / "p.csv")[0] == 0
    assert run(capsys, "retract-trace", "J0", "--out", tmp_path / "x.csv")[0] == 2


def test_dolbeault_command(capsys):
    code, out, _ = run(capsys, "dolbeault", "J0")
    d = json.loads(out)
    assert code == 0 and (d["ker1"], d["rank0"], d["h1"]) == (6, 0, 6) and d["dims"] == [3, 9, 9, 3]
