"""CLI tests through typer's CliRunner."""

import json

import pytest
from typer.testing import CliRunner

from plasmon_dressed import __version__
from plasmon_dressed.cli import app

runner = CliRunner()


def error_payload(result):
    line = next(line for line in result.stdout.splitlines() if line.startswith("{"))
    return json.loads(line)


@pytest.fixture
def fast_args(fast_settings):
    args = []
    for assignment in fast_settings:
        args += ["--set", assignment]
    return args


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_help_without_command():
    result = runner.invoke(app, [])
    assert result.exit_code == 0
    assert "gap-sweep" in result.stdout


def test_modes(fast_args, tmp_path):
    result = runner.invoke(app, fast_args + ["modes"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "modes.csv").exists()
    assert (tmp_path / "modes.json").exists()
    assert "Plasmon modes" in result.stdout


def test_out_option(fast_args, tmp_path):
    target = tmp_path / "elsewhere"
    result = runner.invoke(app, fast_args + ["--out", str(target), "gap-sweep", "--gaps", "1,2"])
    assert result.exit_code == 0, result.output
    assert (target / "gap-sweep.csv").exists()


def test_invalid_value_exits_with_config_code(fast_args):
    result = runner.invoke(app, fast_args + ["--set", "radius_nm=-1", "modes"])
    assert result.exit_code == 2
    payload = error_payload(result)
    assert payload["error"] == "ConfigError"
    assert payload["exit_code"] == 2
    assert "radius_nm: radius must be > 0" in payload["problems"]


def test_unknown_key(fast_args):
    result = runner.invoke(app, fast_args + ["--set", "radious=3", "modes"])
    assert result.exit_code == 2
    assert error_payload(result)["problems"] == ["radious: unknown key"]


def test_config_file(tmp_path, fast_args):
    path = tmp_path / "bad.toml"
    path.write_text("[sphere]\nradius_nm = 8\n")
    result = runner.invoke(app, ["--config", str(path)] + fast_args + ["modes"])
    assert result.exit_code == 2


def test_fit_failure_exits_with_numerical_code(fast_args):
    window = ["--set", "energy_min_ev=2.0", "--set", "energy_max_ev=2.5", "--set", "modes=1"]
    result = runner.invoke(app, fast_args + window + ["modes"])
    assert result.exit_code == 3
    payload = error_payload(result)
    assert payload["error"] == "FitError"
    assert payload["exit_code"] == 3


def test_spectrum_near_subset(fast_args, tmp_path):
    result = runner.invoke(app, fast_args + ["spectrum", "near", "--modes", "3"])
    assert result.exit_code == 0, result.output
    sidecar = json.loads((tmp_path / "spectrum-near.json").read_text())
    assert sidecar["metadata"]["mode_subset"] == [3]
    assert sidecar["config"]["mode_subset"] == [3]


@pytest.mark.parametrize("order", ["0", "4"])
def test_spectrum_near_rejects_bad_subset(fast_args, order):
    result = runner.invoke(app, fast_args + ["spectrum", "near", "--modes", order])
    assert result.exit_code == 2
    payload = error_payload(result)
    assert payload["error"] == "ConfigError"
    assert any("mode_subset" in problem for problem in payload["problems"])


def test_spectrum_far_detector(fast_args, tmp_path):
    result = runner.invoke(
        app, fast_args + ["spectrum", "far", "--theta", "1.0", "--projection", "scalar"]
    )
    assert result.exit_code == 0, result.output
    sidecar = json.loads((tmp_path / "spectrum-far.json").read_text())
    assert sidecar["config"]["detector_theta_rad"] == 1.0
    assert sidecar["metadata"]["projection"] == "scalar"


def test_pattern(fast_args):
    result = runner.invoke(app, fast_args + ["pattern", "--energy-ev", "2.86"])
    assert result.exit_code == 0, result.output
    assert "Forward asymmetry" in result.stdout


def test_dressed_json(fast_args, tmp_path):
    result = runner.invoke(app, fast_args + ["dressed", "--json"])
    assert result.exit_code == 0, result.output
    assert "vectors" in json.loads((tmp_path / "dressed.json").read_text())


def test_dynamics(fast_args, tmp_path):
    result = runner.invoke(app, fast_args + ["dynamics"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "dynamics.csv").exists()


def test_bad_gaps(fast_args):
    result = runner.invoke(app, fast_args + ["gap-sweep", "--gaps", "1,two"])
    assert result.exit_code == 2
    assert error_payload(result)["exit_code"] == 2


def test_validate_reports_failures(fast_args, tmp_path):
    result = runner.invoke(app, fast_args + ["validate"])
    assert result.exit_code == 3
    assert "multipole_convergence" in result.stdout
    assert (tmp_path / "validate.json").exists()
