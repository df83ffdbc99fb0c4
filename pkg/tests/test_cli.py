import io

import pytest

from modgames import formats
from modgames.cli import main


def run(argv, capsys):
    out = io.StringIO()
    code = main(argv, out=out)
    cap = capsys.readouterr()
    return code, out.getvalue() + cap.out, cap.err


def test_validate(data_dir, capsys):
    code, out, _ = run(["validate", str(data_dir / "sample.rgg")], capsys)
    assert code == 0
    assert "0 errors" in out


def test_validate_reports_dangling(tmp_path, data_dir, capsys):
    bad = tmp_path / "bad.rgg"
    bad.write_text((data_dir / "sample.rgg").read_text().replace("box b : M1", "box b : Q"))
    code, _, err = run(["validate", str(bad)], capsys)
    assert code == 2
    assert "line" in err and "Q" in err


def test_solve_writes_strategy(tmp_path, data_dir, capsys):
    strat = tmp_path / "f.strat"
    code, out, _ = run(["solve", str(data_dir / "sample.rgg"), str(data_dir / "gf_pc.aut"),
                        "-o", str(strat), "--stats"], capsys)
    assert code == 0
    assert out.startswith("WIN")
    assert "# within envelope = True" in out
    code, out, _ = run(["verify", str(data_dir / "sample.rgg"), str(data_dir / "gf_pc.aut"), str(strat)], capsys)
    assert code == 0 and out.strip() == "WINNING"


def test_solve_lose(data_dir, capsys):
    code, out, _ = run(["solve", str(data_dir / "sample.rgg"), str(data_dir / "matching.aut")], capsys)
    assert code == 0 and out.strip() == "LOSE"


def test_verify_rejects(data_dir, capsys):
    code, out, _ = run(["verify", str(data_dir / "sample.rgg"), str(data_dir / "matching.aut"),
                        str(data_dir / "alternate.strat")], capsys)
    assert code == 1 and "NOT WINNING" in out


def test_brute(data_dir, capsys):
    code, out, _ = run(["brute", str(data_dir / "sample.rgg"), str(data_dir / "matching.aut"),
                        "--memory-bound", "2"], capsys)
    assert code == 0 and "memory <= 2" in out


def test_compile_ltl(tmp_path, capsys):
    target = tmp_path / "f.aut"
    code, out, _ = run(["compile-ltl", "F(p & F q)", "--ap", "p,q,r", "-o", str(target), "--stats"], capsys)
    assert code == 0 and "# states: 3" in out
    b = formats.parse_automaton(target.read_text())
    assert b.ap == frozenset({"p", "q", "r"})


def test_compile_ltl_syntax_error(capsys):
    code, _, err = run(["compile-ltl", "F(p &"], capsys)
    assert code == 2 and "column" in err


def test_generate_and_reduce(tmp_path, capsys):
    prefix = str(tmp_path / "inst")
    assert run(["generate", "--seed", "4", "-o", prefix], capsys)[0] == 0
    g = formats.parse_rgg((tmp_path / "inst.rgg").read_text())
    assert g.main == "Main"
    code, out, err = run(["solve", prefix + ".rgg", prefix + ".aut"], capsys)
    assert code == 0 and out.split()[0] in ("WIN", "LOSE")
    code, _, err = run(["reduce", prefix + ".rgg", prefix + ".aut"], capsys)
    assert code == 2 and "not a VPA" in err


def test_export_dot(data_dir, capsys):
    code, out, _ = run(["export-dot", str(data_dir / "sample.rgg")], capsys)
    assert code == 0 and out.startswith('digraph "sample"')
    code, _, err = run(["export-dot", str(data_dir / "alternate.strat")], capsys)
    assert code == 2 and "--game" in err


def test_missing_file(capsys):
    code, _, err = run(["validate", "/nonexistent/x.rgg"], capsys)
    assert code == 2 and "cannot read" in err


def test_subcommand_required():
    with pytest.raises(SystemExit):
        main([])
