import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ripple.cli import RunConfig, initial_modes, main, read_trajectory_csv
from ripple.errors import ConfigurationError


def run(*args):
    return subprocess.run([sys.executable, "-m", "ripple", *args],
                          capture_output=True, text=True)


def write_config(path, **fields):
    path.write_text(json.dumps(fields))
    return path


def parse_check(stdout):
    out = {}
    for line in stdout.splitlines():
        key, _, rest = line.partition(" = ")
        out[key.strip()] = rest.split()[0]
    return out


def test_check_equilibrium():
    cp = run("check", "--initial", "equilibrium")
    assert cp.returncode == 0, cp.stderr
    vals = parse_check(cp.stdout)
    assert vals["gate_72"] == "true"
    assert float(vals["phi0[plus]"]) == pytest.approx(1 / 3, abs=1e-16)
    assert float(vals["phi0[minus]"]) == 0


def test_check_gate_boundary():
    cp = run("check", "--initial", "single:1:0.08333333333333333")
    assert cp.returncode == 1
    assert parse_check(cp.stdout)["gate_72"] == "false"


def test_check_standard_datum():
    cp = run("check", "--initial", "single:1:0.05")
    assert cp.returncode == 0
    vals = parse_check(cp.stdout)
    s0 = 2 * 0.05 ** 2
    assert float(vals["phi0[plus]"]) == pytest.approx((1 + math.sqrt(1 - 36 * s0)) / 6, rel=1e-15)
    assert float(vals["phi0[minus]"]) == pytest.approx((1 - math.sqrt(1 - 36 * s0)) / 6, rel=1e-13)


def test_usage_errors_exit_2(tmp_path):
    assert run("check", "--initial", "bogus").returncode == 2
    bad = write_config(tmp_path / "c.json", N=4, colour="red")
    assert run("check", "--config", str(bad)).returncode == 2
    assert run("check", "--config", str(tmp_path / "missing.json")).returncode == 2
    assert run("check", "--initial", "[[1, 0.01], [1, 0.02]]").returncode == 2
    assert run("check", "--initial", "[[9, 0.01]]", "--set", "N=4").returncode == 2
    assert run("nonsense").returncode == 2


def test_config_round_trip():
    cfg = RunConfig(L=3.0, N=8, branch="minus", initial=[[1, 0.01, 0.002], [3, 0.001, 0.0]],
                    solver="both", T=0.2, dt=0.01, M=40)
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    v = initial_modes(again)
    assert v.coeffs[1] == 0.01 + 0.002j and v.coeffs[3] == 0.001
    with pytest.raises(ConfigurationError):
        RunConfig.from_dict({"solver": "euler"})


def test_random_preset_hits_requested_gate_fraction():
    v = initial_modes(RunConfig(N=12, initial="random:7:0.5"))
    n = np.arange(13)
    assert 2 * np.sum(n ** 2 * np.abs(v.coeffs) ** 2) == pytest.approx(0.5 / 72, rel=1e-12)


def test_solve_equilibrium_both(tmp_path):
    out = tmp_path / "eq"
    cp = run("solve", "--initial", "equilibrium", "--solver", "both", "--set", "T=0.1",
             "--set", "N=8", "--output", str(out), "--quiet")
    assert cp.returncode == 0, cp.stderr
    report = json.loads((out / "report.json").read_text())
    assert report["cross_method_distance"] <= 1e-15
    for name in ("picard", "rk4"):
        assert (out / f"trajectory_{name}.csv").exists()
        header = (out / f"diagnostics_{name}.csv").read_text().splitlines()[0]
        assert header == "t,h_norm,E1,constraint_residual,zero_mean_residual,ux_l2_spectral,ux_l2_physical"


def test_solve_standard_both(tmp_path):
    cfg = write_config(tmp_path / "std.json", N=16, initial="single:1:0.05", solver="both",
                       T=0.1, M=100, dt=1e-3)
    out = tmp_path / "std"
    cp = run("solve", "--config", str(cfg), "--output", str(out))
    assert cp.returncode == 0, cp.stderr
    report = json.loads((out / "report.json").read_text())
    assert report["cross_method_distance"] <= 1e-6
    assert report["solvers"]["picard"]["converged"]
    times, states = read_trajectory_csv(out / "trajectory_rk4.csv")
    assert states.shape == (101, 17)
    assert times[-1] == pytest.approx(0.1)


def test_solve_gate_violation_writes_error(tmp_path):
    out = tmp_path / "bad"
    cp = run("solve", "--initial", "single:1:0.09", "--output", str(out))
    assert cp.returncode == 1
    doc = json.loads((out / "error.json").read_text())
    assert doc["error"] == "gate_violation"


def test_solve_conservation_breach_exit(tmp_path):
    out = tmp_path / "breach"
    cp = run("solve", "--initial", "single:1:0.05", "--set", "dt=0.5", "--set", "t_final=10",
             "--set", "conservation_tol=1e-14", "--output", str(out))
    assert cp.returncode == 1
    assert json.loads((out / "error.json").read_text())["error"] == "conservation_breach"


def test_solve_not_converged_exit(tmp_path):
    out = tmp_path / "nc"
    cp = run("solve", "--initial", "single:1:0.05", "--solver", "picard", "--set", "T=0.1",
             "--set", "max_iter=1", "--output", str(out))
    assert cp.returncode == 1
    assert json.loads((out / "error.json").read_text())["error"] == "not_converged"


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("field")
    assert main(["solve", "--initial", "single:1:0.05", "--set", "N=8", "--set", "t_final=1",
                 "--set", "dt=0.01", "--output", str(out), "--quiet"]) == 0
    return out


def field_rows(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["x", "u", "u_x"]
    return np.array(rows[1:], dtype=float)


def test_field_initial_datum(solved):
    cp = run("field", "--output", str(solved), "--t", "0", "--points", "64")
    assert cp.returncode == 0, cp.stderr
    data = field_rows(cp.stdout)
    s0 = 2 * 0.05 ** 2
    phi0 = (1 + math.sqrt(1 - 36 * s0)) / 6
    np.testing.assert_allclose(data[:, 1], phi0 + 0.1 * np.cos(data[:, 0]), atol=1e-15)
    np.testing.assert_allclose(data[:, 2], -0.1 * np.sin(data[:, 0]), atol=1e-15)
    assert "t = 0" in cp.stderr


def test_field_parseval_on_emitted_data(solved, tmp_path):
    out = tmp_path / "f.csv"
    cp = run("field", "--output", str(solved), "--t", "0.73", "--points", "33", "--out", str(out))
    assert cp.returncode == 0, cp.stderr
    data = field_rows(out.read_text())
    L = 2 * math.pi
    times, states = read_trajectory_csv(solved / "trajectory_rk4.csv")
    j = int(np.argmin(np.abs(times - 0.73)))
    n = np.arange(9)
    e1 = 2 * np.sum(n ** 2 * np.abs(states[j]) ** 2)
    assert L * np.mean(data[:, 2] ** 2) == pytest.approx(L * (2 * math.pi / L) ** 2 * e1, rel=1e-8)


def test_field_equilibrium(tmp_path):
    out = tmp_path / "eqf"
    assert main(["solve", "--initial", "equilibrium", "--set", "N=4", "--set", "t_final=0.5",
                 "--set", "dt=0.1", "--output", str(out), "--quiet"]) == 0
    cp = run("field", "--output", str(out), "--t", "0.3", "--points", "16", "--quiet")
    data = field_rows(cp.stdout)
    np.testing.assert_allclose(data[:, 1], 1 / 3, atol=1e-16)
    assert np.all(data[:, 2] == 0)


def test_field_missing_trajectory(tmp_path):
    cp = run("field", "--output", str(tmp_path / "nowhere"))
    assert cp.returncode == 2
