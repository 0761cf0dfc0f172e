import json

import numpy as np
import pytest

from mldegree.cli import main, to_json
from mldegree.critsolve import draw_sample_covariance


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_float_format():
    assert to_json({"a": 0.1}) == '{"a": 0.10000000000000001}'
    assert json.loads(to_json([1, 2.5, None, True, "x"])) == [1, 2.5, None, True, "x"]
    assert to_json(float("nan")) == "null"


def test_verify_identities(capsys):
    code, out, _ = run(capsys, "verify-identities", "--max-n", "2")
    assert code == 0 and json.loads(out)["passed"]


def test_fault_injection(capsys):
    code, out, err = run(capsys, "verify-identities", "--max-n", "5", "--inject-fault")
    assert code == 2
    assert not json.loads(out)["passed"]
    assert "FAILS" in err and "casoratian" in out + err


def test_lower_bound_text(capsys):
    code, out, _ = run(capsys, "lower-bound", "--n", "8", "--format", "text")
    assert code == 0 and out.strip() == "321"


def test_chordal(capsys):
    code, out, _ = run(capsys, "chordal", "cycle:4")
    assert code == 0 and json.loads(out)["chordal"] is False
    code, out, _ = run(capsys, "chordal", "path:4")
    data = json.loads(out)
    assert data["chordal"] and data["ordering"] is not None


def test_roots_csv(capsys):
    code, out, _ = run(capsys, "roots", "--n", "5", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "index,re,im" and len(lines) == 5


def test_fiber_json_schema(capsys):
    code, out, _ = run(capsys, "fiber", "--n", "5")
    data = json.loads(out)
    assert code == 0 and data["n"] == 5 and data["count"] == 17 == len(data["points"])
    assert set(data["points"][1]) == {"family", "x", "signs", "residual"}


def test_mldeg_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        code, _, _ = run(capsys, "mldeg", "cycle:4", "--no-timing", "-o", str(f))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["count"] == 5 and data["seeds"] == [1, 2, 3]
    assert set(data) == {"graph", "seeds", "count", "paths_tracked", "residual_max",
                         "runtime_ms"}


def test_fiber_bruteforce(capsys):
    code, out, _ = run(capsys, "fiber-bruteforce", "--n", "4")
    assert code == 0 and json.loads(out)["matched"] == 5


def test_mle_command(capsys, tmp_path):
    s = np.array(draw_sample_covariance(4, 1), dtype=float)
    f = tmp_path / "s.csv"
    f.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in s))
    code, out, _ = run(capsys, "mle", "cycle:4", "--cov", str(f))
    data = json.loads(out)
    assert code == 0 and data["method"] == "numeric" and data["residual"] <= 1e-10
    code, out, _ = run(capsys, "mle", "path:4", "--cov", str(f))
    assert code == 0 and json.loads(out)["method"] == "chordal"


def test_monotonicity(capsys):
    code, out, _ = run(capsys, "monotonicity", "complete:4", "--vertex", "0")
    assert code == 0 and json.loads(out)["holds"]


@pytest.mark.parametrize("argv", [
    ["fiber", "--n", "2"],
    ["mldeg", "does-not-exist.json"],
    ["mle", "cycle:4", "--cov", "missing.csv"],
    ["nonsense"],
    ["roots"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 1


def test_bad_graph_json(capsys, tmp_path):
    f = tmp_path / "g.json"
    f.write_text('{"n": 3,\n  "edges": [[0, 1]\n')
    code, _, err = run(capsys, "chordal", str(f))
    assert code == 1 and "line" in err
