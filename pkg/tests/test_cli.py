import json
import math
import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from fockdarboux.cli import UsageError, emit_table, main, parse_values, read_table

CONFIGS = sorted((pathlib.Path(__file__).parent.parent / "configs").glob("*.json"))


def run_cli(args, capsys):
    try:
        rc = main(args)
    except SystemExit as exc:  # argparse rejects bad flags itself
        rc = exc.code
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_parse_values():
    assert parse_values("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1]
    assert parse_values("0:0.3:0.1") == [0, 0.1, 0.2, 0.3]
    assert parse_values("1/3,2") == [1 / 3, 2]
    assert parse_values("0:4:2", int) == [0, 2, 4]
    assert parse_values(["1", 2, "3:4:1"], int) == [1, 2, 3, 4]
    for bad in ("", "1:0:1", "0:1", "0:1:0"):
        with pytest.raises(UsageError):
            parse_values(bad)
    with pytest.raises(UsageError):
        parse_values("0.5", int)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_emit_round_trip_is_bit_exact(values):
    rows = [{"i": i, "x": v} for i, v in enumerate(values)]
    import io, contextlib
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        emit_table(rows, ["i", "x"], metadata={"k": [1, "a"]})
    meta, back = read_table(buf.getvalue())
    assert meta["k"] == [1, "a"]
    assert [float(r["x"]) for r in back] == values
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        emit_table(rows, ["i", "x"], fmt="json")
    meta, back = read_table(buf.getvalue(), "json")
    assert meta["schema"] == ["i", "x"] and [r["x"] for r in back] == values


def test_empty_table_has_header(tmp_path):
    path = tmp_path / "t.csv"
    assert emit_table([], ["a", "b"], path=str(path)) == 0
    text = path.read_bytes().decode()
    assert text.endswith("a,b\r\n")
    assert read_table(str(path))[1] == []


def test_output_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / f"o{k}.csv" for k in range(2)]
    for p in paths:
        assert run_cli(["dispersion", "--n", "0:2:1", "--m", "0,1", "--lambda", "0,0.5",
                        "-o", str(p)], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_parallel_matches_serial(tmp_path, capsys):
    args = ["spectrum", "--n", "0:3:1", "--m=-2,0,2", "--lambda", "0.1,1", "--omega-c", "0,1"]
    run_cli(args + ["-o", str(tmp_path / "a.csv"), "--workers", "1"], capsys)
    run_cli(args + ["-o", str(tmp_path / "b.csv"), "--workers", "2"], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_failed_cell_is_nan_with_reason(capsys):
    rc, out, err = run_cli(["spectrum", "--m=-5,0", "--omega", "0.1", "--omega-c", "1", "--lambda", "1"], capsys)
    assert rc == 1 and "1 cell(s) failed" in err
    _, rows = read_table(out)
    assert math.isnan(float(rows[0]["Omega"])) and "NonNormalizable" in rows[0]["reason"]
    assert rows[1]["reason"] == "" and float(rows[1]["Omega"]) > 0


@pytest.mark.parametrize("args", [
    ["spectrum", "--system", "fd", "--lambda", "0.1"],
    ["spectrum", "--n", "0:1"],
    ["entropy", "--abs-tol", "0"],
    ["spectrum", "--bogus", "1"],
])
def test_usage_errors(args, capsys):
    assert run_cli(args, capsys)[0] == 2


def test_io_error(tmp_path, capsys):
    assert run_cli(["spectrum", "-o", str(tmp_path / "missing" / "x.csv")], capsys)[0] == 3


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "entropy", "n": "0,1", "lambda": [0.5], "alpha": 2}))
    rc, out, _ = run_cli(["--config", str(cfg)], capsys)
    assert rc == 0
    meta, rows = read_table(out)
    assert len(rows) == 2 and meta["config"]["command"] == "entropy"
    cfg.write_text(json.dumps({"command": "entropy", "colour": 1}))
    assert run_cli(["--config", str(cfg)], capsys)[0] == 2


def test_json_output(capsys):
    rc, out, _ = run_cli(["uncertainty", "--format", "json"], capsys)
    meta, rows = read_table(out, "json")
    assert rc == 0 and abs(rows[0]["xi_renyi"]) < 1e-6


def test_geometry_and_omega_cut(capsys):
    rc, out, _ = run_cli(["geometry", "--x", "0:1:0.5"], capsys)
    assert rc == 0 and len(read_table(out)[1]) == 3
    rc, out, _ = run_cli(["omega-cut", "--lambda", "0.5", "--no-p2"], capsys)
    assert rc == 0 and float(read_table(out)[1][0]["omega_cut"]) == pytest.approx(1.38606, abs=1e-5)


def test_validate(capsys):
    rc, out, _ = run_cli(["validate"], capsys)
    assert rc == 0 and "10/10 checks passed" in out


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_shipped_configs_resolve(path):
    from fockdarboux.cli import _cells, _resolve, _schema

    opts, _ = _resolve(["--config", str(path)])
    assert list(_cells(opts["command"], opts)) and _schema(opts["command"], opts)
