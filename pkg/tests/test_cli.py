"""Command-line interface: exit codes, JSON output, grid export."""

import json

import numpy as np
import pytest

from torichk import parse_arrangement
from torichk.cli import run_cli


def _run(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _write_arrangement(tmp_path, doc, name="arr.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_validate_catalog_entry(capsys):
    code, out, err = _run(capsys, "validate", "eguchi-hanson")
    assert code == 0
    doc = json.loads(out)
    assert doc["smooth"] is True


def test_validate_rejects_bad_normal(capsys, tmp_path):
    path = _write_arrangement(tmp_path, {
        "n": 1, "flats": [{"u": [2], "lambda": [0, 0, 0], "a": 1.0}]})
    code, out, err = _run(capsys, "validate", path)
    assert code == 2
    assert "normal not primitive (gcd 2)" in err


def test_validate_missing_file(capsys):
    code, out, err = _run(capsys, "validate", "/no/such/file.json")
    assert code == 2
    assert "error:" in err


def test_validate_rejects_malformed_shape(capsys, tmp_path):
    # catalog summary records carry "flats" as a count; feeding one in
    # directly must fail cleanly, not with a traceback
    path = _write_arrangement(tmp_path, {"n": 1, "flats": 2, "name": "x"})
    code, out, err = _run(capsys, "validate", path)
    assert code == 2
    assert 'field "flats" must be a list' in err


def test_validate_nonsmooth_exit_one(capsys):
    code, out, err = _run(capsys, "validate", "n2-nonsmooth")
    assert code == 1
    doc = json.loads(out)
    assert doc["smooth"] is False
    assert doc["failing_stratum"]["active"] == [0, 1]
    assert doc["invariant_factors"] == [1, 2]


def test_classify_fields(capsys):
    code, out, err = _run(capsys, "classify", "taub-nut")
    assert code == 0
    doc = json.loads(out)
    assert doc["volume_growth_exponent"] == 3
    assert doc["taub_nut_order"] == 1
    assert doc["ale_label"] is None
    assert isinstance(doc["strata"], list)


def test_eval_point(capsys):
    code, out, err = _run(capsys, "eval", "flat-H", "--point", "1,0,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["phi"][0][0] == pytest.approx(0.25, abs=1e-14)
    assert doc["F"] == pytest.approx(np.log(2.0) - 1.0, abs=1e-14)
    assert len(doc["metric"]) == 4
    assert len(doc["quotient_metric"]) == 3


def test_eval_on_flat_exits_two(capsys):
    code, out, err = _run(capsys, "eval", "flat-H", "--point", "0,0,0")
    assert code == 2
    assert "error:" in err


def test_eval_rejects_malformed_point(capsys):
    code, out, err = _run(capsys, "eval", "flat-H", "--point", "1,2")
    assert code == 2


def test_verify_subset_passes(capsys):
    code, out, err = _run(capsys, "verify", "flat-cylinder",
                          "--checks", "phi-fd,roundtrip", "--seed", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["all_passed"] is True
    assert [r["check"] for r in doc["reports"]] == ["phi-fd", "roundtrip"]
    for r in doc["reports"]:
        assert r["pass"] is True
        assert "wall_time_s" in r


def test_verify_unknown_check(capsys):
    code, out, err = _run(capsys, "verify", "flat-H", "--checks", "bogus")
    assert code == 2
    assert "unknown check" in err


def test_verify_deterministic_modulo_wall_time(capsys):
    def strip(doc):
        for r in doc["reports"]:
            r.pop("wall_time_s")
        return doc

    code1, out1, _ = _run(capsys, "verify", "eguchi-hanson",
                          "--checks", "phi-fd,polyharmonic,roundtrip",
                          "--seed", "11")
    code2, out2, _ = _run(capsys, "verify", "eguchi-hanson",
                          "--checks", "phi-fd,polyharmonic,roundtrip",
                          "--seed", "11")
    assert code1 == code2 == 0
    assert strip(json.loads(out1)) == strip(json.loads(out2))


def test_growth_command(capsys):
    code, out, err = _run(capsys, "growth", "taub-nut",
                          "--radii", "60,120,240,480,960",
                          "--samples", "1024", "--seed", "9")
    assert code == 0
    doc = json.loads(out)
    assert doc["exponent"] == pytest.approx(3.0, abs=0.2)
    assert len(doc["volumes"]) == 5


def test_growth_insufficient_exits_one(capsys):
    code, out, err = _run(capsys, "growth", "eguchi-hanson",
                          "--radii", "4.6,5.2", "--samples", "32",
                          "--seed", "210")
    assert code == 1
    assert "check failed" in err


def test_export_grid(capsys, tmp_path):
    out_path = tmp_path / "grid.csv"
    code, out, err = _run(capsys, "export-grid", "flat-H",
                          "--axis", "x1", "--range=-1:1:5",
                          "--axis", "rez1", "--range=0.5:1.5:3",
                          "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[:3] == ["x1", "rez1", "imz1"]
    assert "det_phi" in header and "det_g" in header
    assert len(lines) == 1 + 5 * 3
    # every grid point keeps rez1 >= 0.5, safely off the flat
    for line in lines[1:]:
        assert "nan" not in line.lower()


def test_export_grid_nan_on_flat(capsys, tmp_path):
    out_path = tmp_path / "grid.csv"
    code, out, err = _run(capsys, "export-grid", "flat-H",
                          "--axis", "x1", "--range=-1:1:3",
                          "--out", str(out_path))
    assert code == 0
    rows = out_path.read_text().strip().splitlines()[1:]
    # x1 = 0, z = 0 is on the flat and x1 = -1, z = 0 on the branch cut:
    # both rows are kept with NaN values; x1 = +1 evaluates cleanly
    for row in (rows[0], rows[1]):
        assert any(tok == "nan" for tok in row.split(",")[3:])
    assert "nan" not in rows[2].lower()
    assert float(rows[2].split(",")[0]) == 1.0


def test_catalog_listing_roundtrips(capsys):
    code, out, err = _run(capsys, "catalog")
    assert code == 0
    entries = json.loads(out)
    names = [e["name"] for e in entries]
    assert "eguchi-hanson" in names and "n2-nonsmooth" in names
    for e in entries:
        arr, B = parse_arrangement(e["arrangement"])
        assert arr.dimension == e["n"]
        assert len(arr.flats) == e["flats"]
        assert B.order == e["taub_nut_order"]


def test_no_command_shows_usage(capsys):
    code, out, err = _run(capsys, "--help")
    assert code == 0
