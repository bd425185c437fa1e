import pytest
from click.testing import CliRunner

from cli import cli
from controllers import read_trace


@pytest.fixture
def runner():
    return CliRunner()


def test_list_problems(runner):
    result = runner.invoke(cli, ["list-problems"])
    assert result.exit_code == 0
    assert "rosenbrock-box" in result.output
    assert "powell-equality" in result.output


def test_solve_convex_writes_a_checkable_trace(runner, tmp_path):
    trace = tmp_path / "quartic.jsonl"
    result = runner.invoke(cli, ["solve-convex", "--problem", "quartic-box", "--p", "2", "--eps", "1e-4",
                                 "--trace-out", str(trace)])
    assert result.exit_code == 0, result.output
    assert "status: CriticalityReached" in result.output
    assert read_trace(trace)

    check = runner.invoke(cli, ["check-trace", str(trace)])
    assert check.exit_code == 0, check.output
    assert "FAIL" not in check.output


def test_tampered_trace_fails_the_check(runner, tmp_path):
    trace = tmp_path / "linear.jsonl"
    runner.invoke(cli, ["solve-convex", "--problem", "linear-box", "--p", "1", "--trace-out", str(trace)])
    lines = trace.read_text().splitlines()
    index = next(i for i, line in enumerate(lines) if '"arpcc-iter"' in line)
    lines[index] = lines[index].replace('"outcome":"very_successful"', '"outcome":"unsuccessful"')
    trace.write_text("\n".join(lines) + "\n")
    check = runner.invoke(cli, ["check-trace", str(trace)])
    assert check.exit_code == 1
    assert "FAIL  outcome" in check.output


def test_undecodable_trace_is_reported_as_an_error(runner, tmp_path):
    trace = tmp_path / "binary.jsonl"
    trace.write_bytes(b"\xff\xfe\x00garbage\n")
    check = runner.invoke(cli, ["check-trace", str(trace)])
    assert check.exit_code == 1
    assert check.exception is None or isinstance(check.exception, SystemExit)
    assert "UTF-8" in check.output


def test_solve_general_on_the_circle(runner):
    result = runner.invoke(cli, ["solve-general", "--problem", "circle", "--p", "2", "--eps-p", "1e-2",
                                 "--eps-d", "1e-3"])
    assert result.exit_code == 0, result.output
    assert "certificate: ScaledKKT (phase 2)" in result.output
    assert "verified: True" in result.output


def test_invalid_parameters_are_usage_errors(runner):
    result = runner.invoke(cli, ["solve-convex", "--problem", "quartic-box", "--gamma1", "1.5"])
    assert result.exit_code == 2
    assert "gamma1" in result.output

    unknown = runner.invoke(cli, ["solve-convex", "--problem", "nowhere"])
    assert unknown.exit_code == 2

    order = runner.invoke(cli, ["solve-convex", "--problem", "quartic-box", "--p", "4"])
    assert order.exit_code == 2


def test_domain_errors_exit_with_one(runner):
    result = runner.invoke(cli, ["solve-general", "--problem", "quartic-box", "--eps-p", "1e-2"])
    assert result.exit_code == 1
    assert "no equality constraints" in result.output


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / "solver.env"
    config.write_text("eps=1e-3\np=3\n")
    result = runner.invoke(cli, ["--config", str(config), "solve-convex", "--problem", "quartic-box", "--p", "1"])
    assert result.exit_code == 0, result.output
    assert "p=1  eps=0.001" in result.output


def test_sweep_command(runner):
    result = runner.invoke(cli, ["sweep", "--problem", "quartic-box", "--p", "2", "--eps-grid", "1e-2,1e-3,1e-4,1e-5"])
    assert result.exit_code == 0, result.output
    assert "within bound" in result.output

    short = runner.invoke(cli, ["sweep", "--problem", "quartic-box", "--eps-grid", "1e-2,1e-3"])
    assert short.exit_code == 1
    assert "at least 4" in short.output
