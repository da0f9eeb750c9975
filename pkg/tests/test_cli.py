import json

from typer.testing import CliRunner

from src.algebra import factorize, format_factorization
from src.cli import app
from src.db import reset_engine

runner = CliRunner()


def _json(args):
    result = runner.invoke(app, [*args, "--format", "json"])
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_trees_text_and_json():
    result = runner.invoke(app, ["trees", "1,2,3"])
    assert result.exit_code == 0
    assert "count: 2" in result.stdout
    assert _json(["trees", "1,2,3"])["count"] == 2


def test_invariants_odd_support():
    payload = _json(["invariants", "--type", "1,1,1,9,17"])
    assert payload["odd_support"] == [3, 5, 7, 11, 13, 17, 19, 29]


def test_invariants_for_chosen_primes():
    payload = _json(["invariants", "--type", "1,1,1,2,77", "--p", "7", "--p", "11"])
    assert [pr["kind"] for pr in payload["primes"]] == ["AI_REGULAR", "AI_REGULAR"]
    assert payload["primes"][0]["regular_slots"] == [4]


def test_family_ones_ab_reports_discriminant():
    payload = _json(["family", "ones-ab", "--n", "5", "--a", "9", "--b", "17"])
    results = payload["results"]
    assert results["hpoly"] == [4845, 8721, 6885, 2805, 495]
    assert format_factorization(factorize(results["discriminant"])) in results["discriminant_factorization"]


def test_family_abc_and_ab():
    payload = _json(["family", "abc", "--a", "1", "--b", "2", "--c", "3", "--p", "5"])
    assert payload["results"]["case"] == "UNIQUE_RATIONAL"
    assert payload["results"]["field_radicand"] == -1
    payload = _json(["family", "ab", "--a", "1", "--b", "2"])
    assert payload["results"]["kummer_invariant"] == "6"


def test_solve_json():
    payload = _json(["solve", "--type", "1,2,3", "--p", "7"])
    assert payload["model_count"] == 6
    assert payload["orbit_sizes"] == [2]


def test_correspondence_json():
    payload = _json(["correspondence", "--type", "1,2,5", "--p", "5", "--slot", "2", "-M", "8"])
    assert payload["model_count"] == 2
    assert all(pair["round_trip"] for pair in payload["pairs"])


def test_domain_errors_exit_3_with_a_tag():
    result = runner.invoke(app, ["solve", "--type", "1,2,3", "--p", "3", "--format", "json"])
    assert result.exit_code == 3
    payload = json.loads(result.stdout)
    assert payload["error"]["tag"] == "WILD_PRIME"

    result = runner.invoke(app, ["trees", "0,2"])
    assert result.exit_code == 3


def test_usage_errors_exit_2():
    assert runner.invoke(app, ["trees"]).exit_code == 2
    assert runner.invoke(app, ["census", "--family", "abc"]).exit_code == 2


def test_output_is_deterministic():
    args = ["invariants", "--type", "1,1,1,2,72", "--format", "json"]
    first = runner.invoke(app, args)
    second = runner.invoke(app, args)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout


def test_census_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv("DESSINS4_DB_PATH", str(tmp_path / "cli.db"))
    reset_engine()
    swept = _json(["census", "--nmax", "3", "--bmax", "4"])
    assert len(swept["rows"]) == 3
    shown = _json(["census", "--show"])
    assert [(r["a"], r["b"]) for r in shown["rows"]] == [(2, 3), (2, 4), (3, 4)]

    result = runner.invoke(app, ["census", "--show"])
    assert result.exit_code == 0
    assert "Census" in result.stdout


def test_zero_precision_is_rejected():
    commands = [
        ["lift", "--type", "1,2,3", "--p", "5"],
        ["correspondence", "--type", "1,2,5", "--p", "5", "--slot", "2"],
    ]
    for command in commands:
        result = runner.invoke(app, [*command, "-M", "0", "--format", "json"])
        assert result.exit_code == 3
        assert json.loads(result.stdout)["error"]["tag"] == "DEGENERATE_INPUT"
