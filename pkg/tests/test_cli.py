import json
import math

import pytest

from recshape.cli import run

COS = json.dumps({"order": 2, "coefficients": [2 * math.cos(1), -1.0], "initial": [1.0, math.cos(1)]})
SEVEN = '{"order": 1, "coefficients": [1], "initial": [7]}'


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_constant(capsys):
    code, out, _ = call(capsys, "sample", SEVEN, "--n", "3")
    assert code == 0
    assert out.split() == ["7", "7", "7"]


def test_sample_fibonacci_burn_in(capsys):
    fib = '{"order": 2, "coefficients": [1, 1], "initial": [0, 1]}'
    code, out, _ = call(capsys, "sample", fib, "--n", "4", "--burn-in", "10")
    assert out.split() == ["55", "89", "144", "233"]


def test_sample_from_file(tmp_path, capsys):
    path = tmp_path / "rec.json"
    path.write_text(SEVEN)
    code, out, _ = call(capsys, "sample", str(path), "--n", "2")
    assert code == 0 and out.split() == ["7", "7"]


def test_analyze_cos(capsys):
    code, out, _ = call(capsys, "analyze", COS, "--n", "100000")
    assert code == 0
    data = json.loads(out)
    assert data["classification"] == "INTERVALS"
    assert data["method"] == "EXACT"
    (lo, hi), = data["intervals"]
    assert abs(lo + 1) < 1e-3 and abs(hi - 1) < 1e-3


def test_analyze_dump_spectral(capsys):
    code, out, _ = call(capsys, "analyze", COS, "--n", "1000", "--dump-spectral")
    spec = json.loads(out)["spectral"]
    assert spec["growth"] == "BOUNDED_OSCILLATORY"
    assert spec["g"] == 1


def test_analyze_empirical(capsys):
    code, out, _ = call(capsys, "analyze", COS, "--n", "100000", "--empirical-only")
    assert json.loads(out)["method"] == "EMPIRICAL"


def test_analyze_deterministic(capsys):
    _, a, _ = call(capsys, "analyze", COS, "--n", "20000")
    _, b, _ = call(capsys, "analyze", COS, "--n", "20000")
    assert a == b


def test_synthesize(capsys, tmp_path):
    out_path = tmp_path / "rec.json"
    code, _, _ = call(capsys, "synthesize", "[[0, 1], [2, 4]]", "--n", "100000", "-o", str(out_path))
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["order"] == 7
    assert data["verification"]["status"] == "PASS"
    assert data["verification"]["plan_cover_exact"] is True


def test_roundtrip_seed(capsys):
    code, out, _ = call(capsys, "roundtrip", "--seed", "3", "--n", "200000")
    assert code == 0
    assert json.loads(out)["status"] == "PASS"


def test_roundtrip_fail_exit(capsys):
    code, out, _ = call(capsys, "roundtrip", "[[0, 1], [2, 4]]", "--n", "2000", "--tolerance", "1e-9")
    assert code == 1
    assert json.loads(out)["status"] == "FAIL"


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "{not json"],
        ["sample", '{"order": 1, "coefficients": [1]}'],
        ["sample", "/nonexistent/file.json"],
        ["synthesize", "[[2, 1]]"],
        ["roundtrip"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_rejects_bad_n(capsys):
    with pytest.raises(SystemExit) as info:
        run(["sample", SEVEN, "--n", "0"])
    assert info.value.code == 2


def test_overflow_exit(capsys):
    code, _, err = call(capsys, "sample", '{"order": 1, "coefficients": [10], "initial": [1]}', "--n", "400")
    assert code == 1
    assert "309" in err
