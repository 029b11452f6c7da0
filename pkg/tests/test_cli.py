import io
import json

import numpy as np
import pytest

from koehler.cli import run


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    report = json.loads(out.getvalue()) if out.getvalue() else None
    return code, report, err.getvalue()


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _status(report):
    return {c["name"]: c["status"] for c in report["checks"]}


def test_cyclicity_three_cycle(tmp_path):
    p = _write(tmp_path, "p.json", [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    code, rep, _ = _run(["cyclicity", "--input", p])
    assert code == 0
    assert rep["schema"] == 1 and rep["input_digest"].startswith("sha256:")
    angles = rep["analysis"]["peripheral_angles"]
    assert np.allclose(sorted(angles), [0, 2 * np.pi / 3, 4 * np.pi / 3], atol=1e-9)
    assert set(_status(rep).values()) == {"pass"}


def test_decompose_identity(tmp_path):
    p = _write(tmp_path, "i.json", np.eye(4).tolist())
    code, rep, _ = _run(["decompose", "--input", p])
    assert code == 0
    assert rep["analysis"]["rev_dim"] == 4
    assert set(_status(rep).values()) == {"pass"}
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)


@pytest.mark.parametrize("method", ["spectral", "dynamical", "both"])
def test_decompose_methods(tmp_path, method):
    p = _write(tmp_path, "d.json", {"dim": 2, "entries": [[1, 0], [0, 0.5]]})
    code, rep, _ = _run(["decompose", "--input", p, "--method", method])
    assert code == 0
    assert rep["analysis"]["P"]["entries"] == [[1.0, 0.0], [0.0, 0.0]]


def test_ipsearch(tmp_path):
    p = _write(tmp_path, "a.json", [1, 3, 4, 9, 10, 12, 13])
    code, rep, _ = _run(["ipsearch", "--set", p, "--length", "3"])
    assert code == 0 and rep["analysis"]["witness"]["sequence"] == [1, 3, 9]
    code, rep, _ = _run(["ipsearch", "--set", _write(tmp_path, "b.json", [1, 2]), "--length", "2"])
    assert code == 0 and rep["analysis"]["witness"] is None


def test_semigroup_transformations(tmp_path):
    p = _write(tmp_path, "g.json", {"kind": "transformations", "generators": [[1, 2, 0], [1, 0, 2], [0, 0, 2]]})
    code, rep, _ = _run(["semigroup", "--generators", p])
    assert code == 0
    assert rep["analysis"]["size"] == 27 and len(rep["analysis"]["idempotents"]) == 10


def test_semigroup_matrices_with_epsilon(tmp_path):
    c, s = np.cos(2 * np.pi / 5), np.sin(2 * np.pi / 5)
    p = _write(tmp_path, "m.json", {"kind": "matrices", "generators": [[[c, -s], [s, c]]]})
    code, rep, _ = _run(["semigroup", "--generators", p, "--epsilon", "1e-9"])
    assert code == 0 and rep["analysis"]["size"] == 5


def test_semigroup_cayley_skips_correspondence(tmp_path):
    p = _write(tmp_path, "c.json", {"size": 2, "cayley": [[0, 0], [1, 1]]})
    code, rep, _ = _run(["semigroup", "--generators", p])
    assert code == 0 and _status(rep)["minidem_correspondence"] == "skip"


def test_fixtures_list_and_emit():
    code, rep, _ = _run(["fixtures", "--list"])
    assert code == 0 and "cyclic_shift5" in [f["name"] for f in rep["analysis"]["fixtures"]]
    code, rep, _ = _run(["fixtures", "--emit", "mixed", "42"])
    assert code == 0 and rep["analysis"]["expected"]["rev_dim"] == 1


@pytest.mark.parametrize("content", ["{not json", json.dumps({"entries": [[1, 2], [3]]}),
                                     json.dumps([[2, 0], [0, 1]])])
def test_malformed_input_exit_2(tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, rep, err = _run(["decompose", "--input", str(p)])
    assert code == 2 and rep is None and "malformed input" in err


def test_missing_file_and_bad_args():
    assert _run(["decompose", "--input", "/nonexistent.json"])[0] == 2
    assert _run(["bogus"])[0] == 2
    assert _run(["fixtures", "--emit", "mixed", "x"])[0] == 2


def test_check_failure_exit_1(tmp_path):
    # ker P decays like 0.999^n, too slowly for the default horizon of 1000
    p = _write(tmp_path, "slow.json", np.diag([1.0, 0.999]).tolist())
    code, rep, err = _run(["decompose", "--input", p, "--method", "spectral"])
    assert code == 1
    assert "HorizonError" in err
    assert _status(rep) == {"HorizonError": "fail"}


def test_env_overrides(tmp_path, monkeypatch):
    p = _write(tmp_path, "slow.json", np.diag([1.0, 0.999]).tolist())
    monkeypatch.setenv("KOEHLER_HORIZON", "20000")
    code, rep, _ = _run(["decompose", "--input", p, "--method", "spectral"])
    assert code == 0
    monkeypatch.setenv("KOEHLER_TOL", "abc")
    assert _run(["decompose", "--input", p])[0] == 2


def test_battery_small_is_deterministic():
    a = _run(["battery", "--seed", "3", "--count", "3"])
    b = _run(["battery", "--seed", "3", "--count", "3"])
    assert a[0] == b[0] == 0
    for r in (a[1], b[1]):
        r.pop("wall_time")
    assert a[1] == b[1]
