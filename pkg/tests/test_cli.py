import json

import pytest

from f2rank2 import catalog
from f2rank2.cli import main


def run(capsys, tmp_path, *args):
    code = main(["--cache-dir", str(tmp_path), *args])
    out = capsys.readouterr()
    return code, out.out, out.err


def text(name):
    return catalog.get(name).text


def test_equiv_beasley_prints_witness(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "equiv", text("Beasley1"), text("Beasley2"))
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "equivalent" and lines[2].startswith("P = [") and lines[3].startswith("Q = [")


def test_equiv_t2_t3_not_similar(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "equiv", text("T2"), text("T3"), "--mode", "similar")
    assert code == 1 and out.splitlines()[1] == "inequivalent"


def test_equiv_self_is_identity(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "--output", "json", "equiv", text("U3"), text("U3"))
    rec = json.loads(out.splitlines()[1])
    assert code == 0 and rec["P"] == rec["Q"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_equiv_affine(capsys, tmp_path):
    code, _, _ = run(capsys, tmp_path, "equiv", text("I3+T2"), text("I3+T3"), "--mode", "affine")
    assert code == 0


@pytest.mark.parametrize(
    "args",
    [
        ("equiv", "[a,b", "[a]"),
        ("equiv", "[1,a;0,1]", "[a,0;0,1]"),
        ("equiv", "[a,b]", "[a;b]"),
        ("classify", "--n", "5", "--p", "5", "--dim", "1"),
        ("classify", "--n", "3", "--p", "3", "--dim", "7"),
        ("catalog", "nope"),
    ],
)
def test_usage_errors_exit_2(capsys, tmp_path, args):
    code, _, err = run(capsys, tmp_path, *args)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "bogus"])
    assert exc.value.code == 2


def test_classify_examples(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "classify", "--n", "3", "--p", "3", "--dim", "3", "--predicate", "primitive", "--action", "equiv")
    assert code == 0 and out.splitlines()[-1] == "classes: 6"
    assert "urk=2" in out and "n2=" in out
    _, out, _ = run(capsys, tmp_path, "classify", "--n", "3", "--p", "3", "--dim", "1", "--predicate", "reduced")
    assert out.splitlines()[-1] == "classes: 0"
    _, out, _ = run(capsys, tmp_path, "classify", "--n", "3", "--p", "4", "--dim", "3", "--predicate", "primitive")
    assert out.splitlines()[-1] == "classes: 0"


def test_classify_similarity(capsys, tmp_path):
    code, out, _ = run(
        capsys, tmp_path, "--output", "json", "classify", "--n", "3", "--p", "3", "--dim", "3",
        "--filter", "trivial_spectrum", "--action", "similar",
    )
    assert code == 0 and json.loads(out.splitlines()[-1]) == {"classes": 6}


def test_verify_json_lines_and_header(capsys, tmp_path):
    code, out, err = run(capsys, tmp_path, "--output", "json", "--seed", "3", "verify", "spectrum")
    lines = out.splitlines()
    assert code == 0
    header = json.loads(lines[0])["config"]
    assert header == {"cache_dir": str(tmp_path), "output": "json", "seed": 3, "threads": 0}
    recs = [json.loads(l) for l in lines[1:]]
    assert all(r["suite"] == "spectrum" and r["status"] == "pass" for r in recs)
    assert "spectrum: pass" in err


def test_verify_is_byte_identical(capsys, tmp_path):
    _, first, _ = run(capsys, tmp_path, "verify", "affine")
    _, second, _ = run(capsys, tmp_path, "verify", "affine")
    assert first == second


def test_verify_with_corrupted_catalog_fails(capsys, tmp_path, monkeypatch):
    src, _ = catalog.catalog_source()
    bad = tmp_path / "bad.txt"
    bad.write_text(src.replace("expect: dim=3,urk=2,reduced=true,primitive=true,rank_constant=true", "expect: dim=3,urk=2,reduced=true,primitive=false,rank_constant=true", 1))
    monkeypatch.setenv("F2RANK2_CATALOG", str(bad))
    catalog._verified.cache_clear()
    try:
        code, out, _ = run(capsys, tmp_path, "verify", "counting")
    finally:
        monkeypatch.delenv("F2RANK2_CATALOG")
        catalog._verified.cache_clear()
    assert code == 1 and "FAIL" in out and "U3" in out


def test_catalog_command(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "catalog", "U3")
    assert code == 0 and "matrix: [0,a,a+c;a,0,b;a+b,c,0]" in out
    code, out, _ = run(capsys, tmp_path, "catalog")
    assert code == 0 and len(out.splitlines()) == len(catalog.names()) + 1


def test_cache_commands(capsys, tmp_path):
    run(capsys, tmp_path, "equiv", text("U3"), text("Mata3"))
    code, out, _ = run(capsys, tmp_path, "cache", "stats")
    assert code == 0 and "equiv-3x3.txt" in out
    code, out, _ = run(capsys, tmp_path, "cache", "clear")
    assert code == 0 and "removed 1" in out
    _, out, _ = run(capsys, tmp_path, "cache", "stats")
    assert "empty" in out


def test_env_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("F2RANK2_CACHE", str(tmp_path / "env"))
    main(["catalog", "J3"])
    assert f"cache_dir={tmp_path / 'env'}" in capsys.readouterr().out
