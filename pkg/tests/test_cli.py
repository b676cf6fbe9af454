import json

import numpy as np
import pytest

from kreinpair.cli import emit_fixtures, main


@pytest.fixture
def fixtures(tmp_path):
    emit_fixtures(tmp_path)
    return tmp_path


def run(argv, tmp_path, capsys):
    out = tmp_path / "out.json"
    code = main([*argv, "--out", str(out)])
    capsys.readouterr()
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_analyze_fixtures(fixtures, capsys):
    want = {"diag_pair": "λ", "identity_pair": "1", "rotation_pair": "λ^2 + 1"}
    for name, poly in want.items():
        code, rep = run(["analyze", str(fixtures / f"{name}.json")], fixtures, capsys)
        assert code == 0 and rep["summary"] == "PASS"
        assert rep["definitizing_polynomial"]["p"] == poly
    code, rep = run(["analyze", str(fixtures / "nilpotent_pair.json")], fixtures, capsys)
    assert code == 0 and rep["critical_set"] == [pytest.approx(0.0, abs=1e-6)]


def test_sl_configs(fixtures, capsys):
    for name in ("sl_n3", "sl_indefinite"):
        code, rep = run(["sl", str(fixtures / f"{name}.json")], fixtures, capsys)
        assert code == 0 and rep["summary"] == "PASS"


def test_output_deterministic(fixtures, capsys):
    outs = []
    for _ in range(2):
        main(["analyze", str(fixtures / "rotation_pair.json"), "--seed", "3"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 3


def test_project(fixtures, capsys):
    code, rep = run(["project", str(fixtures / "diag_pair.json"), "--set", "[0,4]"], fixtures, capsys)
    assert code == 0
    assert np.allclose(np.array(rep["E"]["re"]), np.diag([1.0, 0.0]), atol=1e-12)
    assert main(["project", str(fixtures / "nilpotent_pair.json"), "--set", "[0,1]"]) == 1
    assert main(["project", str(fixtures / "diag_pair.json"), "--set", "[0,"]) == 1


@pytest.mark.parametrize(
    "payload,needle",
    [
        ('{"A": [[1, 0], [0, 1]], "G": [[1, 0]', "parse error"),
        ('{"A": [[1, 2], [0, 1]], "G": [[1, 0], [0, 1]]}', "non-Hermitian"),
        ('{"A": [[1, 0], [0, 1]], "G": [[1]]}', "dimension mismatch"),
        ('{"A": [[1]]}', "expected an object"),
    ],
)
def test_bad_inputs_exit_1(tmp_path, capsys, payload, needle):
    f = tmp_path / "bad.json"
    f.write_text(payload)
    assert main(["analyze", str(f)]) == 1
    assert needle in capsys.readouterr().err


def test_bad_options_and_configs(fixtures, tmp_path, capsys):
    pair = str(fixtures / "diag_pair.json")
    assert main(["analyze", pair, "--lambda0", "1,0"]) == 1
    assert main(["analyze", pair, "--degree-cap", "0"]) == 1
    assert main(["analyze", str(tmp_path / "missing.json")]) == 1
    cfg = tmp_path / "sl.json"
    cfg.write_text('{"interval": [0, 1], "n": 1}')
    assert main(["sl", str(cfg)]) == 1
    capsys.readouterr()


def test_degree_cap_too_small_fails(fixtures, capsys):
    assert main(["analyze", str(fixtures / "rotation_pair.json"), "--degree-cap", "1"]) == 2
    capsys.readouterr()


def test_fixture_round_trip(fixtures, capsys):
    from kreinpair.cli import load_pair, write_pair

    pair, digest = load_pair(fixtures / "rotation_pair.json")
    write_pair(pair, fixtures / "copy.json")
    again, digest2 = load_pair(fixtures / "copy.json")
    assert np.array_equal(pair.A, again.A) and np.array_equal(pair.G, again.G)
    assert digest == digest2


def test_selftest_subset(capsys):
    assert main(["selftest", "--only", "1,6", "--scale", "0.1"]) == 0
    err = capsys.readouterr().err
    assert err.count("[PASS]") == 2
