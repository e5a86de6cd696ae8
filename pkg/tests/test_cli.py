import json

import pytest

from purgatorio import purgatory
from purgatorio.cli import main
from purgatorio.core import Game


@pytest.fixture
def p12(tmp_path):
    path = tmp_path / "p12.json"
    assert main(["generate", "--positions", "1", "--actions", "2", "-o", str(path)]) == 0
    return path


def test_generate(tmp_path):
    out = tmp_path / "g.json"
    assert main(["generate", "--positions", "3", "--actions", "2", "-o", str(out)]) == 0
    assert Game.from_json(out.read_text()) == purgatory.build(3, 2)


def test_generate_bad_size(capsys):
    assert main(["generate", "--positions", "0", "--actions", "2"]) == 2
    assert "error" in capsys.readouterr().err


def test_vi_trace(p12, capsys):
    assert main(["vi", str(p12), "--iters", "100"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,improvements,v_1,patience,min_prob_position,reply"
    assert lines[1:] == ["1,,1/2,,,", "10,,10/11,,,", "100,,100/101,,,"]


def test_si_trace(tmp_path, capsys):
    game = tmp_path / "p72.json"
    main(["generate", "--positions", "7", "--actions", "2", "-o", str(game)])
    capsys.readouterr()
    assert main(["si", str(game), "--iters", "2", "--record-at", "all", "--cross-check"]) == 0
    rows = capsys.readouterr().out.splitlines()
    first = rows[1].split(",")
    assert first[:3] == ["1", "0", "1/128"]
    assert first[-1] == "1;1;1;1;1;1;1"


def test_float_mode(p12, capsys):
    assert main(["vi", str(p12), "--iters", "3", "--mode", "float", "--record-at", "3"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[0] == "3" and float(row[2]) == pytest.approx(0.75, abs=1e-15)


def test_missing_game_file(tmp_path, capsys):
    assert main(["si", str(tmp_path / "missing.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_invalid_game_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num_positions": 1, "num_actions": 2, "transitions": [[[5, 1], [0, 2]]]}')
    assert main(["vi", str(bad)]) == 2
    assert "pointer 5" in capsys.readouterr().err


def test_bad_schedule(p12):
    assert main(["vi", str(p12), "--iters", "5", "--record-at", "10"]) == 2
    assert main(["vi", str(p12), "--iters", "0"]) == 2
    assert main(["vi", str(p12), "--mode", "decimal"]) == 2


def test_bounds(capsys):
    assert main(["bounds", "--positions", "4", "--actions", "2", "--k", "2"]) == 0
    reports = json.loads(capsys.readouterr().out)
    names = [r["name"] for r in reports]
    assert names == ["many_pos_value_upper", "patience_lower_eps_optimal", "si_lower_iterations"]
    assert reports[0]["bound"] == "3/4"


def test_bounds_one_position(capsys):
    assert main(["bounds", "--positions", "1", "--actions", "2", "--T", "1"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["bound"] == "3/4"
    assert main(["bounds", "--positions", "3", "--actions", "2", "--k", "2"]) == 2


def test_table1_short(capsys):
    assert main(["table1", "--max-exponent", "1", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["improvements"] for r in rows] == [1, 10]
    assert rows[1]["valuation"] == pytest.approx(0.035, abs=0.002)
    assert main(["table1", "--max-exponent", "9"]) == 2


def test_verify_suites(capsys):
    assert main(["verify", "si-lemmas", "--positions", "3", "--actions", "2", "--iters", "20"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["suite"] == "si-lemmas"
    assert main(["verify", "vi-si-sync", "--actions", "2", "--iters", "30"]) == 0
    assert main(["verify", "best-reply-brute", "--samples", "5"]) == 0


def test_verify_failure_exit_code(capsys):
    # Exact SI on P(1,3) outgrows the arithmetic budget long before t = 100.
    assert main(["verify", "si-lemmas", "--positions", "1", "--actions", "3", "--iters", "100"]) == 1
    report = json.loads(capsys.readouterr().out)
    failed = [p["name"] for p in report["properties"] if not p["passed"]]
    assert failed == ["exact_arithmetic_budget"]


def test_verify_unknown_suite(capsys):
    assert main(["verify", "unknown"]) == 2
    assert "unknown suite" in capsys.readouterr().err
