from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

from conftest import TABLE
from strata2rec import format_relation, load_relation
from strata2rec.cli import main
from strata2rec.series import printed_coefficients


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _short_genus1(tmp_path, last):
    from strata2rec import genus1_load

    g = genus1_load()
    path = tmp_path / f"g1_{last}.tsv"
    path.write_text("# truncated copy\nc1\t-1/8\n" + "".join(f"{d}\t{g[d]}\n" for d in range(1, last + 1)))
    return str(path)


def test_compute_csv_reproduces_table(capsys):
    code, out, _ = _run(capsys, "compute", "--max-degree", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    for r in rows:
        assert tuple(Fraction(r[k]) for k in ("N2", "H2", "P2")) == tuple(map(Fraction, TABLE[int(r["d"])]))
        assert not any("." in r[k] for k in r)


def test_compute_json_and_text(capsys):
    code, out, _ = _run(capsys, "compute", "--max-degree", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["rows"][2] == {"d": 3, "N2": "0", "H2": "-1/4", "P2": "-1/12"}
    code, out, _ = _run(capsys, "compute", "--max-degree", "4")
    assert code == 0 and "25/4" in out.splitlines()[-1]


def test_compute_single_degree(capsys):
    code, out, _ = _run(capsys, "compute", "--max-degree", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["d,N2,H2,P2", "1,0,0,0"]


def test_compute_output_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    assert main(["compute", "--max-degree", "2", "--format", "csv", "--output", str(target)]) == 0
    assert target.read_text().splitlines()[-1] == "2,0,0,0"


def test_compute_missing_genus1_degrees(tmp_path, capsys):
    code, _, err = _run(capsys, "compute", "--max-degree", "12", "--genus1", _short_genus1(tmp_path, 10))
    assert code == 2
    assert "insufficient genus-1 data" in json.loads(err)["error"]


def test_compute_is_deterministic_across_thread_counts(monkeypatch, capsys):
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv("STRATA2REC_THREADS", n)
        code, out, _ = _run(capsys, "compute", "--max-degree", "6", "--format", "csv")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_malformed_genus1_file(tmp_path, capsys):
    path = tmp_path / "bad.tsv"
    path.write_text("c1\t-1/8\n1\t0\n2\tnope\n")
    code, _, err = _run(capsys, "compute", "--max-degree", "1", "--genus1", str(path))
    assert code == 2 and ":3:" in json.loads(err)["error"]


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["compute", "--max-degree", "0"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["emit-recursion", "--assignment", "1,1"])
    assert info.value.code == 1


def test_verify_default_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["ok"]
    assert [c["degree"] for c in report["checks"]] == list(range(1, 11))


def test_verify_degree_three(capsys):
    code, out, _ = _run(capsys, "verify", "--max-degree", "3", "--format", "json")
    assert code == 0
    last = json.loads(out)["checks"][-1]
    assert (last["degree"], last["lhs"], last["rhs"]) == (3, "0", "0")


def test_verify_with_perturbed_relation(tmp_path, capsys):
    rel = load_relation()
    terms = list(rel.terms)
    terms[4] = terms[4].scaled(Fraction(3, 2))
    path = tmp_path / "perturbed.strata"
    path.write_text(format_relation(type(rel)(tuple(terms), rel.genus, rel.markings)))
    code, _, err = _run(capsys, "verify", "--max-degree", "5", "--relation", str(path))
    assert code == 3
    diag = json.loads(err)
    assert diag["error"] == "inconsistent system" and isinstance(diag["degree"], int)


def test_bad_relation_file(tmp_path, capsys):
    path = tmp_path / "bad.strata"
    path.write_text("relation genus=2 markings=3\nterm 1\na g=2 m={1,2,3} ???\n")
    code, _, err = _run(capsys, "compute", "--max-degree", "1", "--relation", str(path))
    assert code == 2 and json.loads(err)["kind"] == "DSLSyntaxError"


def test_emit_infeasible(capsys):
    code, _, err = _run(capsys, "emit-recursion", "--assignment", "2,2,2", "--max-degree", "1")
    assert code == 2 and json.loads(err)["error"] == "infeasible assignment"


def test_emit_t1_matches_printed_coefficients(capsys):
    code, out, _ = _run(capsys, "emit-recursion", "--assignment", "1,1,1", "--max-degree", "8", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    names = {"p20": "N2*N0", "ph0": "H2*N0", "p10": "N1*N0"}
    for entry in doc["degrees"]:
        d = entry["degree"]
        got = {(t["family"], tuple(t["split"])): Fraction(t["coefficient"]) for t in entry["terms"]}
        fam = printed_coefficients(d)
        for key, family in names.items():
            for split, value in fam[key].items():
                assert got.get((family, split), 0) == value
    assert "H2*N0" in doc["closed_forms"]


def test_emit_mixed_assignment_is_well_formed(capsys):
    code, out, _ = _run(capsys, "emit-recursion", "--assignment", "1,1,2", "--max-degree", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {int(r["degree"]) for r in rows} == {1, 2, 3, 4, 5}
    assert all("." not in r["coefficient"] for r in rows)
