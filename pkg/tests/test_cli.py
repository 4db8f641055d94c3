"""End-to-end CLI tests against golden files.

Set TORICPREVAR_REGEN_GOLDEN=1 to rewrite the golden files.
"""
import io
import json
import os
import shutil
from pathlib import Path

import pytest

import helpers
from helpers import DATA
from toricprevar.cli import main

GOLDEN = Path(__file__).resolve().parent / "golden"
REGEN = os.environ.get("TORICPREVAR_REGEN_GOLDEN") == "1"
CASES = helpers.cli_cases()


@pytest.mark.parametrize("cid,argv", CASES, ids=[c for c, _ in CASES])
def test_golden(cid, argv, tmp_path):
    arts = helpers.run_cli(argv, tmp_path)
    folder = GOLDEN / cid
    if REGEN:
        shutil.rmtree(folder, ignore_errors=True)
        folder.mkdir(parents=True)
        for name, text in arts.items():
            (folder / name).write_bytes(text.encode("utf-8"))
    assert sorted(p.name for p in folder.iterdir()) == sorted(arts)
    for name, text in arts.items():
        assert (folder / name).read_bytes() == text.encode("utf-8"), name


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_good_summary_on_hyperbolic_example():
    code, out, _ = run("check-good", "--sublattice", "L", str(DATA / "ex6_8.toric"))
    assert code == 0
    assert "summary: holds; L_hat = span((1,-1))" in out


def test_check_good_reports_condition_i_witness():
    code, out, _ = run("check-good", "--sublattice", "L", str(DATA / "ex6_10.toric"))
    assert code == 0
    assert "1 2 cone((0,0,0,1,0,0) (1,0,0,0,0,0)) condition i" in out


def test_orbits_doubled_line_json():
    code, out, _ = run("orbits", "--json", str(DATA / "ex2_4.toric"))
    data = json.loads(out)
    assert code == 0 and data["classes"] == 3 and len(data["edges"]) == 2


def test_quotient_is_rank_one_ray():
    code, out, _ = run("quotient", "--sublattice", "L", "--json", str(DATA / "ex6_8.toric"))
    data = json.loads(out)
    assert data["fan"]["rank"] == 1
    assert data["fan"]["charts"] == {"1": ["cone((1))"]}


def test_json_mirrors_text_keys():
    _, text, _ = run("validate", str(DATA / "ex2_6.toric"))
    _, js, _ = run("validate", "--json", str(DATA / "ex2_6.toric"))
    data = json.loads(js)
    assert text.splitlines()[0].split(":")[0] in data


def test_usage_error_exit_code():
    code, _, _ = run("prequotient", str(DATA / "ex6_8.toric"))
    assert code == 2


def test_domain_error_exit_code():
    code, _, err = run("cox", "--mode", "good", str(DATA / "ex8_3.toric"))
    assert code == 1 and "NotAffineIntersection" in err


def test_unknown_sublattice_is_domain_error():
    code, _, err = run("check-good", "--sublattice", "X", str(DATA / "ex6_8.toric"))
    assert code == 1 and "X" in err


def test_syntax_error_located(tmp_path):
    bad = tmp_path / "bad.toric"
    bad.write_text("toricsys 1\nrank 2\nchart 1: (1,0,0)\n")
    code, _, err = run("validate", str(bad))
    assert code == 1 and "line 3" in err


def test_invalid_system_exit_one(tmp_path):
    bad = tmp_path / "bad.toric"
    bad.write_text("toricsys 1\nrank 1\nchart 1: (1)\nchart 2: (1)\nchart 3: (1)\n"
                   "glue 1 2: (1)\nglue 2 3: (1)\nglue 1 3: 0\n")
    code, out, _ = run("validate", str(bad))
    assert code == 1 and "valid: false" in out


def test_missing_file_exit_one(tmp_path):
    code, _, _ = run("validate", str(tmp_path / "nope.toric"))
    assert code == 1


def test_every_shipped_file_has_cases():
    stems = {p.stem for p in DATA.glob("*.toric")}
    covered = {argv[-1] for _, argv in CASES}
    assert {str(DATA / f"{s}.toric") for s in stems} <= covered
