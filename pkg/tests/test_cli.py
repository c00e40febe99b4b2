import csv
import io
import json
import math

import numpy as np
import pytest

from pdmosc import oracle
from pdmosc.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK, delta_rows, main, max_m1_for_tolerance
from pdmosc.errors import NotFound
from pdmosc.model import HBAR_SI, ModelParams


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_constants_zero_gradient(capsys):
    code, out = run(capsys, "constants", "--m1", "0")
    assert code == EXIT_OK
    vals = {r["name"]: float(r["value"]) for r in rows(out)}
    assert vals["sigma"] == 0 and vals["eta"] == 0 and vals["beta"] > 0


def test_constants_json(capsys):
    code, out = run(capsys, "constants", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["sigma"] == pytest.approx(1.5 * 0.05**2)


def test_spectrum_csv_format(capsys):
    code, out = run(capsys, "spectrum", "--n-max", "3")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "n,e0,eH1,eH2,eH_total,eK1,eK2,eK_total,eH_exact,eK_exact"
    assert len(lines) == 5
    for r in rows(out):
        assert float(r["eH_total"]) == pytest.approx(float(r["eH_exact"]), abs=1e-3)
        assert "," not in r["e0"] and "e" not in r["n"]


def test_spectrum_json_round_trip(capsys):
    code, out = run(capsys, "spectrum", "--n-max", "3", "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    rep = oracle.SpectrumReport.from_dict(d["K"])
    assert rep.to_dict() == d["K"]
    assert rep == oracle.spectrum_report(ModelParams(m1=0.05), "K", 3)


def test_determinism(tmp_path):
    for cmd in (["spectrum"], ["delta", "--format", "json"], ["classical", "--periods", "1"]):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        assert main(cmd + ["--out", str(a)]) == EXIT_OK
        assert main(cmd + ["--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()


def test_unit_coherence(capsys):
    _, nat = run(capsys, "spectrum", "--n-max", "4", "--m1", "0.04")
    _, si = run(capsys, "spectrum", "--n-max", "4", "--m1", "0.04", "--units", "si")
    hw = HBAR_SI * 1e10
    for rn, rs in zip(rows(nat), rows(si)):
        for col in ("eH1", "eH2", "eK1", "eK2", "eH_total", "eK_exact"):
            assert float(rs[col]) / hw == pytest.approx(float(rn[col]), rel=1e-12)


def test_omega_convention(capsys):
    _, a = run(capsys, "constants", "--units", "si", "--omega", "1e10")
    _, b = run(capsys, "constants", "--units", "si", "--omega", str(1e10 / (2 * math.pi)),
               "--omega-convention", "hz_times_2pi")
    va = {r["name"]: float(r["value"]) for r in rows(a)}
    vb = {r["name"]: float(r["value"]) for r in rows(b)}
    for key in va:
        assert vb[key] == pytest.approx(va[key], rel=1e-12)


def test_config_errors(capsys):
    assert main(["spectrum", "--m0", "2"]) == EXIT_CONFIG
    assert main(["spectrum", "--N", "12"]) == EXIT_CONFIG
    assert main(["spectrum", "--lambda-grid", "0.1,0.2"]) == EXIT_CONFIG
    assert main(["spectrum", "--lambda-grid", "a,b"]) == EXIT_CONFIG
    assert main(["classical", "--m1", "2", "--x0", "-1"]) == EXIT_CONFIG
    capsys.readouterr()


def test_convergence_failure(capsys):
    assert main(["spectrum", "--m1", "3"]) == EXIT_CONVERGENCE
    capsys.readouterr()


def test_verify_defaults(capsys):
    code, out = run(capsys, "verify")
    assert code == EXIT_OK
    assert "FAIL" not in out
    assert "misprint" in out  # verdicts are informational only


def test_verify_json(capsys):
    code, out = run(capsys, "verify", "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert all(c["passed"] for c in d["properties"])
    assert any(v["verdict"] == "misprint" for v in d["verdicts"])


def test_classical_cosine(capsys):
    code, out = run(capsys, "classical", "--m1", "0", "--periods", "2")
    assert code == EXIT_OK
    data = np.array([[float(v) for v in r.values()] for r in rows(out)])
    assert data.shape == (2001, 6)
    t, x, p = data[:, 0], data[:, 1], data[:, 2]
    assert np.abs(x - np.cos(t)).max() <= 1e-8
    assert np.abs(p + np.sin(t)).max() <= 1e-8


def test_delta_default_uses_rule(capsys):
    code, out = run(capsys, "delta", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["m1_from_tolerance_rule"]
    assert d["params"]["m1"] == max_m1_for_tolerance(ModelParams(), 6)
    for r in d["rows"]:
        assert r["deltaE_closed_form"] == pytest.approx(r["deltaE_numeric"], rel=1e-9)


def test_max_m1_rule():
    p = ModelParams()
    small, large = max_m1_for_tolerance(p, 2), max_m1_for_tolerance(p, 10, N=48)
    assert large <= small
    assert 0 < large < 1


def test_max_m1_si_matches_natural():
    si = ModelParams.si(m0=1e-17, omega=1e10, hbar=HBAR_SI)
    d = max_m1_for_tolerance(ModelParams(), 6)
    assert max_m1_for_tolerance(si, 6) == pytest.approx(d * si.m0 / si.length_scale, rel=1e-12)


def test_max_m1_not_found(monkeypatch):
    import pdmosc.cli as cli
    monkeypatch.setattr(cli, "_within_tolerance", lambda *a: True)
    with pytest.raises(NotFound):
        max_m1_for_tolerance(ModelParams(), 2)


def test_delta_scales_quadratically():
    a = delta_rows(ModelParams(m1=0.002), 4)
    b = delta_rows(ModelParams(m1=0.004), 4)
    for (_, da, _), (_, db, _) in zip(a, b):
        assert db / da == pytest.approx(4.0, rel=1e-3)
