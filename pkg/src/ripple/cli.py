"""Command line interface: ``ripple check | solve | field``.

Runs are configured by a flat JSON document (``--config``); flags given on
the command line override its fields. Exit codes: 0 success, 1
admissibility or convergence failure, 2 usage or I/O error.
"""
import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .diagnostics import CSV_FIELDS, batch_records, drift_report
from .errors import ConfigurationError, RippleError
from .evolution import EvolutionConfig, cross_method_distance, integrate
from .mode_space import ModeVector, synthesize, synthesize_derivative
from .picard import continue_solution
from .zero_mode import FOLD, GATE, BranchSign, admissibility, build_initial, solve_zero_mode

log = logging.getLogger("ripple")

SOLVERS = ("picard", "rk4", "both")


@dataclasses.dataclass
class RunConfig:
    L: float = 2.0 * math.pi
    N: int = 16
    branch: str = "plus"
    initial: object = "equilibrium"
    solver: str = "rk4"
    T: float | None = None
    t_final: float | None = None
    dt: float = 1e-3
    M: int = 100
    tol: float = 1e-10
    max_iter: int = 200
    conservation_tol: float = 1e-6
    stride: int | None = None
    seed: int = 0

    def __post_init__(self):
        self.L = float(self.L)
        self.N = int(self.N)
        self.M = int(self.M)
        self.max_iter = int(self.max_iter)
        if not (self.L > 0 and self.N >= 1 and self.M >= 1):
            raise ConfigurationError("need L > 0, N >= 1, M >= 1")
        self.branch = BranchSign.parse(self.branch).value
        if self.solver not in SOLVERS:
            raise ConfigurationError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if isinstance(self.initial, tuple):
            self.initial = [list(m) for m in self.initial]

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(str(exc)) from exc

    def to_dict(self):
        return dataclasses.asdict(self)

    @property
    def horizon(self):
        return self.T if self.T is not None else (self.t_final if self.t_final is not None else 0.1)

    @property
    def final_time(self):
        return self.t_final if self.t_final is not None else self.horizon


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IOError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    return data


def _mode_list(cfg, entries):
    modes = {}
    for entry in entries:
        if not isinstance(entry, (list, tuple)) or not 2 <= len(entry) <= 3:
            raise ConfigurationError(f"mode entries are [n, re] or [n, re, im], got {entry!r}")
        n = int(entry[0])
        if n in modes:
            raise ConfigurationError(f"mode {n} listed twice")
        im = float(entry[2]) if len(entry) == 3 else 0.0
        modes[n] = complex(float(entry[1]), im)
    return ModeVector.from_modes(cfg.L, cfg.N, modes)


def random_modes(L, N, seed, fraction):
    """Random smooth datum with sum n^2 |phi_n|^2 = fraction / 72."""
    rng = np.random.default_rng(seed)
    n = np.arange(1, N + 1)
    c = np.zeros(N + 1, dtype=np.complex128)
    c[1:] = (rng.normal(size=N) + 1j * rng.normal(size=N)) * np.exp(-0.5 * n)
    s2 = 2.0 * np.sum(n ** 2 * np.abs(c[1:]) ** 2)
    c *= math.sqrt(fraction * GATE / s2)
    return ModeVector(L, c)


def initial_modes(cfg: RunConfig) -> ModeVector:
    spec = cfg.initial
    if isinstance(spec, list):
        return _mode_list(cfg, spec)
    if not isinstance(spec, str):
        raise ConfigurationError(f"cannot interpret initial datum {spec!r}")
    parts = spec.split(":")
    try:
        if parts[0] == "equilibrium" and len(parts) == 1:
            return ModeVector.zeros(cfg.L, cfg.N)
        if parts[0] == "single" and len(parts) == 3:
            return ModeVector.from_modes(cfg.L, cfg.N, {int(parts[1]): float(parts[2])})
        if parts[0] == "random" and len(parts) == 3:
            return random_modes(cfg.L, cfg.N, int(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ConfigurationError(f"bad preset {spec!r}: {exc}") from exc
    raise ConfigurationError(
        f"unknown preset {spec!r}; use equilibrium, single:<n>:<amp> or random:<seed>:<fraction>")


def _fmt(x):
    return format(float(x), ".17g")


def trajectory_csv(traj):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "n", "re", "im"))
    for t, row in zip(traj.times, traj.states):
        for n, c in enumerate(row):
            w.writerow((_fmt(t), n, _fmt(c.real), _fmt(c.imag)))
    return buf.getvalue()


def diagnostics_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(tuple(_fmt(x) for x in r.row()))
    return buf.getvalue()


def read_trajectory_csv(path):
    """Return ``(times, states)`` from a long-form trajectory CSV."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [(float(r["t"]), int(r["n"]), float(r["re"]), float(r["im"])) for r in reader]
    if not rows:
        raise ConfigurationError(f"{path} holds no samples")
    times = sorted({r[0] for r in rows})
    N = max(r[1] for r in rows)
    index = {t: i for i, t in enumerate(times)}
    states = np.zeros((len(times), N + 1), dtype=np.complex128)
    for t, n, re, im in rows:
        states[index[t], n] = complex(re, im)
    return np.array(times), states


# -- subcommands --------------------------------------------------------------

def cmd_check(cfg: RunConfig, out=sys.stdout, quiet=False):
    modes = initial_modes(cfg)
    rep = admissibility(modes)
    phi0 = {}
    for b in BranchSign:
        phi0[b.value] = solve_zero_mode(rep.S0, b) if rep.S0 <= FOLD else None
    if not quiet:
        print(f"S2 = {_fmt(rep.S2)}  (gate: < 1/72 = {_fmt(GATE)})", file=out)
        print(f"S0 = {_fmt(rep.S0)}  (real mean requires <= 1/36)", file=out)
        print(f"gate_72 = {str(rep.gate_72).lower()}", file=out)
        print(f"gate_36 = {str(rep.gate_36).lower()}", file=out)
        for b, v in phi0.items():
            print(f"phi0[{b}] = {'none' if v is None else _fmt(v)}", file=out)
    return rep, phi0


def _picard_section(cfg, phi, branch):
    sol = continue_solution(phi, cfg.horizon, cfg.M, cfg.tol, cfg.max_iter, branch)
    fp = sol.fixed_point
    meta = {
        "requested_horizon": sol.requested_horizon,
        "accepted_horizon": sol.horizon,
        "halvings": sol.halvings,
        "windows": sol.windows,
        "iterations": fp.iterations,
        "final_update_norm": fp.final_update_norm,
        "contraction_ratios": fp.contraction_ratios,
        "integral_residual": fp.integral_residual,
        "converged": fp.converged,
    }
    return sol.trajectory, meta


def cmd_solve(cfg: RunConfig, output: Path, quiet=False):
    """Run the configured solver(s) and write CSV and JSON outputs."""
    output.mkdir(parents=True, exist_ok=True)
    branch = BranchSign.parse(cfg.branch)
    phi = build_initial(initial_modes(cfg), branch)
    report = {"config": cfg.to_dict(), "version": __version__, "backend": kernels.BACKEND,
              "solvers": {}}
    picard_traj = None
    if cfg.solver in ("picard", "both"):
        picard_traj, meta = _picard_section(cfg, phi, branch)
        records = batch_records(picard_traj.states, picard_traj.times, cfg.L)
        meta["drift"] = dataclasses.asdict(drift_report(records))
        (output / "trajectory_picard.csv").write_text(trajectory_csv(picard_traj))
        (output / "diagnostics_picard.csv").write_text(diagnostics_csv(records))
        report["solvers"]["picard"] = meta
    if cfg.solver in ("rk4", "both"):
        ecfg = EvolutionConfig(cfg.dt, cfg.final_time, branch, cfg.conservation_tol, cfg.stride)
        traj, records = integrate(phi, ecfg)
        (output / "trajectory_rk4.csv").write_text(trajectory_csv(traj))
        (output / "diagnostics_rk4.csv").write_text(diagnostics_csv(records))
        report["solvers"]["rk4"] = {"steps": int(round(traj.T / ecfg.dt)) if traj.M else 0,
                                    "samples": traj.M + 1,
                                    "drift": dataclasses.asdict(drift_report(records))}
    if picard_traj is not None and cfg.solver == "both":
        report["cross_method_distance"] = cross_method_distance(picard_traj, branch)
    (output / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if not quiet:
        for name, meta in report["solvers"].items():
            print(f"{name}: E1 drift {meta['drift']['max_e1_drift']:.3e}, "
                  f"max constraint residual {meta['drift']['max_constraint_residual']:.3e}")
        if "cross_method_distance" in report:
            print(f"cross-method sup-H distance: {report['cross_method_distance']:.3e}")
        print(f"wrote {output}")
    return report


def cmd_field(output: Path, t, points, solver=None, out=sys.stdout, quiet=False):
    """Write (x, u, u_x) at the stored sample nearest to ``t``."""
    candidates = [solver] if solver else ["rk4", "picard"]
    path = next((output / f"trajectory_{s}.csv" for s in candidates
                 if (output / f"trajectory_{s}.csv").exists()), None)
    if path is None:
        raise FileNotFoundError(f"no stored trajectory in {output}")
    try:
        L = float(json.loads((output / "report.json").read_text())["config"]["L"])
    except (OSError, KeyError, ValueError) as exc:
        raise FileNotFoundError(f"cannot read report.json in {output}: {exc}") from exc
    times, states = read_trajectory_csv(path)
    j = int(np.argmin(np.abs(times - t)))
    u = ModeVector(L, states[j])
    field = synthesize(u, points)
    deriv = synthesize_derivative(u, points)
    if not quiet:
        print(f"# using sample t = {_fmt(times[j])} from {path.name}", file=sys.stderr)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("x", "u", "u_x"))
    for x, a, b in zip(field.xs, field.values, deriv.values):
        w.writerow((_fmt(x), _fmt(a), _fmt(b)))
    return float(times[j])


# -- entry point ---------------------------------------------------------------

def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_parser():
    p = argparse.ArgumentParser(prog="ripple", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ripple {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, help="flat JSON run configuration")
        sp.add_argument("--branch", choices=[b.value for b in BranchSign])
        sp.add_argument("--initial", help="preset name or JSON mode list [[n, re, im], ...]")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field (value parsed as JSON)")
        sp.add_argument("--quiet", action="store_true")

    common(sub.add_parser("check", help="test an initial datum against the admissibility gate"))
    sp = sub.add_parser("solve", help="run the solver(s) and write trajectory/diagnostics")
    common(sp)
    sp.add_argument("--output", type=Path, default=Path("ripple-out"))
    sp.add_argument("--solver", choices=SOLVERS)
    sp = sub.add_parser("field", help="synthesize u and u_x from a stored trajectory")
    sp.add_argument("--output", type=Path, default=Path("ripple-out"),
                    help="directory written by 'solve'")
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--points", type=int, default=128)
    sp.add_argument("--solver", choices=("picard", "rk4"))
    sp.add_argument("--out", type=Path, help="CSV file (default: stdout)")
    sp.add_argument("--quiet", action="store_true")
    return p


def _config_from_args(args):
    data = load_config(args.config) if args.config else {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        data[key] = _parse_value(value)
    if args.branch:
        data["branch"] = args.branch
    if args.initial:
        data["initial"] = _parse_value(args.initial)
    if getattr(args, "solver", None):
        data["solver"] = args.solver
    return RunConfig.from_dict(data)


def _emit_error(exc, output=None):
    doc = {"error": getattr(exc, "category", "io" if isinstance(exc, OSError) else "error"),
           "type": type(exc).__name__, "message": str(exc)}
    for attr in ("t", "s0", "drift"):
        val = getattr(exc, attr, None)
        if val is not None:
            doc[attr] = val
    text = json.dumps(doc, sort_keys=True)
    print(text, file=sys.stderr)
    if output is not None:
        try:
            output.mkdir(parents=True, exist_ok=True)
            (output / "error.json").write_text(text + "\n")
        except OSError:
            pass


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    output = getattr(args, "output", None) if args.command == "solve" else None
    try:
        if args.command == "field":
            if args.out:
                with open(args.out, "w", newline="") as fh:
                    cmd_field(args.output, args.t, args.points, args.solver, fh, args.quiet)
            else:
                cmd_field(args.output, args.t, args.points, args.solver, sys.stdout, args.quiet)
            return 0
        cfg = _config_from_args(args)
        if args.command == "check":
            rep, _ = cmd_check(cfg, quiet=args.quiet)
            return 0 if rep.gate_72 else 1
        cmd_solve(cfg, args.output, args.quiet)
        return 0
    except ConfigurationError as exc:
        _emit_error(exc, output)
        return 2
    except RippleError as exc:
        _emit_error(exc, output)
        return 1
    except OSError as exc:
        _emit_error(exc, output)
        return 2


if __name__ == "__main__":
    sys.exit(main())
