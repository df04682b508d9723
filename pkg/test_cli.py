import json

import pytest
from click.testing import CliRunner

from cli import EXIT_ERROR, EXIT_OK, EXIT_UNRESOLVED, cli, main
from syntax import parse_theory


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def test_parse_prints_the_fragment(runner, theory_path):
    result = runner.invoke(cli, ["parse", str(theory_path("fan2"))])
    assert result.exit_code == EXIT_OK
    assert result.stdout.startswith("theory fan2")
    assert "# fragment: positive_coherent" in result.stdout


def test_prove_exit_codes(runner, theory_path):
    proved = runner.invoke(cli, ["prove", str(theory_path("fan2")), "--sequent", "true |- B"])
    assert proved.exit_code == EXIT_OK
    assert proved.stdout.startswith("proved at depth 4")

    unknown = runner.invoke(cli, ["prove", str(theory_path("fan2_missing")), "--sequent", "true |- B"])
    assert unknown.exit_code == EXIT_UNRESOLVED
    assert "saturated open branch" in unknown.stdout


def test_prove_json_feeds_check_cert(runner, theory_path, tmp_path):
    path = str(theory_path("fan2"))
    proved = runner.invoke(cli, ["--format", "json", "prove", path, "--sequent", "true |- B"])
    assert proved.exit_code == EXIT_OK
    assert json.loads(proved.stdout)["verdict"] == "proved"

    certificate = tmp_path / "proof.json"
    certificate.write_text(proved.stdout, encoding="utf-8")
    checked = runner.invoke(cli, ["check-cert", path, "--sequent", "true |- B", "--certificate", str(certificate)])
    assert checked.exit_code == EXIT_OK
    assert "certificate accepted" in checked.stdout


def test_force(runner, theory_path):
    path = str(theory_path("disj"))
    assert runner.invoke(cli, ["force", path, "--query", "A | B"]).exit_code == EXIT_OK
    assert runner.invoke(cli, ["force", path, "--query", "A"]).exit_code == EXIT_UNRESOLVED
    dot = runner.invoke(cli, ["--format", "dot", "force", path, "--query", "A | B", "--depth", "1"])
    assert dot.exit_code == EXIT_OK
    assert dot.stdout.startswith("digraph")


def test_dot_is_only_for_force(runner, theory_path):
    result = runner.invoke(cli, ["--format", "dot", "parse", str(theory_path("disj"))])
    assert result.exit_code == EXIT_ERROR
    assert "dot output is only available for force" in result.stderr


def test_oracle_refutes(runner, theory_path):
    result = runner.invoke(cli, ["--max-size", "1", "oracle", str(theory_path("disj")), "--sequent", "true |- A"])
    assert result.exit_code == EXIT_UNRESOLVED
    assert result.stdout.startswith("refuted")


def test_chase(runner, theory_path):
    result = runner.invoke(cli, ["chase", str(theory_path("witness"))])
    assert result.exit_code == EXIT_OK
    assert result.stdout.startswith("status: saturated")


def test_errors_carry_the_position(runner, tmp_path):
    broken = tmp_path / "broken.thy"
    broken.write_text("rel A/1.\naxiom A(x) |- A(x) & .\n", encoding="utf-8")
    result = runner.invoke(cli, ["parse", str(broken)])
    assert result.exit_code == EXIT_ERROR
    assert f"{broken}:2:" in result.stderr

    missing = runner.invoke(cli, ["parse", str(tmp_path / "missing.thy")])
    assert missing.exit_code == EXIT_ERROR


def test_generate_is_seeded(runner):
    first = runner.invoke(cli, ["--seed", "7", "generate"])
    second = runner.invoke(cli, ["--seed", "7", "generate"])
    assert first.exit_code == EXIT_OK
    assert first.stdout == second.stdout
    assert parse_theory(first.stdout).signature.relations


def test_main_returns_exit_codes(theory_path):
    assert main(["prove"]) == EXIT_ERROR
    assert main(["parse", str(theory_path("disj"))]) == EXIT_OK
    assert main(["oracle", str(theory_path("disj")), "--sequent", "true |- A"]) == EXIT_UNRESOLVED
