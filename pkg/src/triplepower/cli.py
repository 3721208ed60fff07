"""
Command-line interface for triplepower.

Usage:
    triplepower classify -a 0.125 -b 1 -c 1 -p 1 -q 2 -r 3
    triplepower tilde -a 1 -b 1 -c 1 -p 1 -q 2 -r 3
    triplepower thresholds -p 3 -q 5
    triplepower verify --seed 42 --trials 1000
    triplepower shoot -n 1 --omega 0.1 -p 3 -q 5 --csv profile.csv
    triplepower sweep -n 3 -p 3 -q 5 --omegas 0.05,0.10,0.15,0.21,0.30

Global flags (``--json``, ``--csv``, ``--config``, ``--rel-tol``) may be given
before or after the subcommand. Exit codes: 0 success, 1 computational or
property failure, 2 usage error.
"""

from __future__ import annotations

import configparser
import csv
import functools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import oracle, verify
from .powerfun import DomainError, TriplePower, classify, threshold, tilde, turning_point
from .shooting import (
    GroundState,
    IntegrationError,
    ShootingConfig,
    find_ground_state,
    sweep_omega,
)
from .thresholds import DoublePower, eta_threshold, omega_threshold

__all__ = ["cli", "OutputRecord", "main"]

DEFAULT_REL_TOL = 1e-12
KINDS = ("classification", "tilde", "thresholds", "verify-summary", "trajectory", "sweep-row")
TRAJECTORY_COLUMNS = ("r", "u", "u_r", "energy")
SWEEP_COLUMNS = ("omega", "omega_threshold", "eta_threshold", "predicted", "found", "alpha_star")


def format_scalar(value) -> str:
    """Text form of a payload value; floats use the shortest round-tripping repr."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_scalar(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return str(value)


@dataclass
class OutputRecord:
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown record kind {self.kind!r}")

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, **self.payload}, allow_nan=True)

    def to_text(self) -> str:
        width = max((len(k) for k in self.payload), default=0)
        lines = [f"[{self.kind}]"]
        lines += [f"  {k:<{width}}  {format_scalar(v)}" for k, v in self.payload.items()]
        return "\n".join(lines)


class UsageFailure(click.ClickException):
    exit_code = 2


class ComputationFailure(click.ClickException):
    exit_code = 1


def _read_config(path: str) -> dict[str, str]:
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageFailure(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise UsageFailure(f"malformed config {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in parser["config"].items()}


def _settings(ctx: click.Context, kwargs: dict) -> dict:
    """Merge command-line values, config-file values and group-level globals.

    Explicit command-line flags win over the config file, which wins over
    built-in defaults.
    """
    group = ctx.find_root().params
    for name in ("json_output", "csv_path", "config_path", "rel_tol"):
        if kwargs.get(name) in (None, False) and group.get(name) not in (None, False):
            kwargs[name] = group[name]
    if kwargs.get("config_path"):
        params = {p.name: p for p in ctx.command.params}
        for key, raw in _read_config(kwargs["config_path"]).items():
            if key not in params:
                raise UsageFailure(f"unknown config key {key!r} for {ctx.command.name}")
            source = ctx.get_parameter_source(key)
            if kwargs.get(key) is None or source is click.core.ParameterSource.DEFAULT:
                try:
                    kwargs[key] = params[key].type_cast_value(ctx, raw.strip())
                except click.BadParameter as exc:
                    raise UsageFailure(f"config key {key}: {exc.message}") from exc
    if kwargs.get("rel_tol") is None:
        kwargs["rel_tol"] = DEFAULT_REL_TOL
    return kwargs


def _require(kwargs: dict, *names: str) -> None:
    missing = [n for n in names if kwargs.get(n) is None]
    if missing:
        raise UsageFailure("missing required option(s): " + ", ".join(missing))


def global_options(func):
    @click.option("--json", "json_output", is_flag=True, default=None,
                  help="One JSON object per line instead of text tables.")
    @click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
                  help="Write trajectory or sweep data to this CSV file.")
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="Plain 'key = value' file with option defaults.")
    @click.option("--rel-tol", "rel_tol", type=float, default=None,
                  help="Relative band for the one-zero case (default 1e-12).")
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        kwargs = _settings(ctx, kwargs)
        try:
            return func(**kwargs)
        except DomainError as exc:
            raise UsageFailure(str(exc)) from exc
        except IntegrationError as exc:
            raise ComputationFailure(str(exc)) from exc

    return wrapper


def triple_options(func):
    for name in ("r", "q", "p", "c", "b", "a"):
        func = click.option(f"-{name}", name, type=float, default=None)(func)
    return func


def emit(records, json_output: bool) -> None:
    for rec in records:
        click.echo(rec.to_json() if json_output else rec.to_text())


def _triple(kwargs) -> TriplePower:
    _require(kwargs, "a", "b", "c", "p", "q", "r")
    return TriplePower(*(kwargs[k] for k in ("a", "b", "c", "p", "q", "r")))


def _classification_payload(f: TriplePower, rel_tol: float) -> dict:
    case = classify(f, rel_tol)
    roots = oracle.find_roots(f)
    return {
        "case": case.label,
        "case_name": case.value,
        "threshold": threshold(f),
        "turning_point": turning_point(f),
        "roots": list(roots.roots),
        "multiplicity": list(roots.multiplicity),
    }


@click.group()
@click.option("--json", "json_output", is_flag=True, default=False,
              help="One JSON object per line instead of text tables.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--rel-tol", "rel_tol", type=float, default=None)
def cli(json_output, csv_path, config_path, rel_tol):
    """Triple-power nonlinearities: classification, tilde transform, thresholds, shooting."""


@cli.command("classify")
@triple_options
@global_options
def cmd_classify(a, b, c, p, q, r, rel_tol, json_output, csv_path, config_path):
    """Decide case (a) positive parts, (b) one double zero, or (c) negative."""
    f = _triple(locals())
    emit([OutputRecord("classification", _classification_payload(f, rel_tol))], json_output)


@cli.command("tilde")
@triple_options
@global_options
def cmd_tilde(a, b, c, p, q, r, rel_tol, json_output, csv_path, config_path):
    """Print the coefficients of (u f')' f - u f'^2 and the dual classification."""
    f = _triple(locals())
    t = tilde(f)
    case, dual = classify(f, rel_tol), classify(t, rel_tol)
    payload = {
        "a": t.a, "b": t.b, "c": t.c, "p": t.p, "q": t.q, "r": t.r,
        "case": case.label, "tilde_case": dual.label,
    }
    emit([OutputRecord("tilde", payload)], json_output)


@cli.command("thresholds")
@click.option("-p", "p", type=float, default=None)
@click.option("-q", "q", type=float, default=None)
@global_options
def cmd_thresholds(p, q, rel_tol, json_output, csv_path, config_path):
    """Existence threshold omega_{p,q} and uniqueness threshold eta_{p,q}."""
    _require(locals(), "p", "q")
    w, e = omega_threshold(p, q), eta_threshold(p, q)
    payload = {"p": p, "q": q, "omega_threshold": w, "eta_threshold": e, "ratio": w / e}
    emit([OutputRecord("thresholds", payload)], json_output)


@cli.command("verify")
@click.option("--seed", type=int, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--report-path", type=click.Path(dir_okay=False), default=None,
              help="Also write the JSON records to this file.")
@global_options
def cmd_verify(seed, trials, report_path, rel_tol, json_output, csv_path, config_path):
    """Run the seeded randomized cross-check suites."""
    seed = 0 if seed is None else seed
    trials = 1000 if trials is None else trials
    if trials < 1:
        raise UsageFailure("requires trials >= 1")
    if seed < 0:
        raise UsageFailure("requires seed >= 0")
    records = []
    first_failure = None
    for res in verify.run_suites(seed, trials):
        payload = {"suite": res.suite, "checked": res.checked, "failed": res.failed,
                   "skipped": res.skipped, "passed": res.passed}
        if res.counterexample is not None:
            payload["counterexample"] = res.counterexample
            first_failure = first_failure or res
        records.append(OutputRecord("verify-summary", payload))
    all_passed = all(r.payload["passed"] for r in records)
    records.append(OutputRecord("verify-summary", {
        "suite": "all", "seed": seed, "trials": trials,
        "passed_suites": sum(r.payload["passed"] for r in records),
        "failed_suites": sum(not r.payload["passed"] for r in records),
        "passed": all_passed,
    }))
    emit(records, json_output)
    if report_path:
        Path(report_path).write_text("".join(r.to_json() + "\n" for r in records))
    if not all_passed:
        detail = first_failure.counterexample if first_failure else {}
        raise ComputationFailure(
            f"suite {first_failure.suite if first_failure else '?'} failed; "
            f"first counterexample: {json.dumps(detail, sort_keys=True)}"
        )


def _shooting_kwargs(step, r_max):
    kw = {}
    if step is not None:
        kw["step"] = step
    if r_max is not None:
        kw["r_max"] = r_max
    return kw


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_scalar(v) for v in row])


@cli.command("shoot")
@click.option("-n", "n", type=int, default=None, help="Space dimension.")
@click.option("--omega", type=float, default=None)
@click.option("-p", "p", type=float, default=None)
@click.option("-q", "q", type=float, default=None)
@click.option("--step", type=float, default=None)
@click.option("--r-max", "r_max", type=float, default=None)
@global_options
def cmd_shoot(n, omega, p, q, step, r_max, rel_tol, json_output, csv_path, config_path):
    """Find the ground state of u'' + (n-1)/r u' - omega u + u^p - u^q = 0."""
    _require(locals(), "n", "omega", "p", "q")
    g = DoublePower(omega, p, q)
    cfg = ShootingConfig.for_double_power(g, n, **_shooting_kwargs(step, r_max))
    result = find_ground_state(cfg)
    payload = {"n": n, "omega": omega, "p": p, "q": q, "step": cfg.step, "r_max": cfg.r_max,
               "found": result.found}
    if isinstance(result, GroundState):
        traj = result.trajectory
        payload.update({
            "alpha_star": result.alpha_star,
            "outcome": traj.outcome.value,
            "r_end": float(traj.r[-1]),
            "energy_residual": result.energy_residual,
            "samples": int(traj.r.size),
        })
        if csv_path:
            E = traj.energy(cfg)
            _write_csv(csv_path, TRAJECTORY_COLUMNS,
                       zip(traj.r.tolist(), traj.u.tolist(), traj.u_r.tolist(), E.tolist()))
    else:
        payload["reason"] = result.reason
    if json_output:
        emit([OutputRecord("trajectory", payload)], True)
    elif isinstance(result, GroundState):
        click.echo(f"alpha_star = {result.alpha_star!r}")
        emit([OutputRecord("trajectory", payload)], False)
    else:
        click.echo(f"NOT FOUND ({result.reason})")


def _omega_list(text: str | None) -> list[float]:
    if text is None:
        return []
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise UsageFailure(f"--omegas must be a comma-separated list of numbers: {text!r}") from exc


@cli.command("sweep")
@click.option("-n", "n", type=int, default=None)
@click.option("-p", "p", type=float, default=None)
@click.option("-q", "q", type=float, default=None)
@click.option("--omegas", type=str, default=None, help="Comma-separated omega values.")
@click.option("--step", type=float, default=None)
@click.option("--r-max", "r_max", type=float, default=None)
@click.option("--workers", type=int, default=1, help="Trajectories integrated concurrently.")
@global_options
def cmd_sweep(n, p, q, omegas, step, r_max, workers, rel_tol, json_output, csv_path,
              config_path):
    """Compare predicted existence (omega < omega_{p,q}) with shooting, one row per omega."""
    _require(locals(), "n", "p", "q")
    if n < 1:
        raise UsageFailure("requires n >= 1")
    values = _omega_list(omegas)
    for w in values:
        DoublePower(w, p, q)
    rows = sweep_omega(p, q, n, values, workers=workers, **_shooting_kwargs(step, r_max))
    records = []
    for row in rows:
        payload = {k: getattr(row, k) for k in SWEEP_COLUMNS}
        payload["agrees"] = row.agrees
        if row.error:
            payload["error"] = row.error
        records.append(OutputRecord("sweep-row", payload))
    emit(records, json_output)
    if csv_path:
        _write_csv(csv_path, SWEEP_COLUMNS,
                   ([getattr(row, k) for k in SWEEP_COLUMNS] for row in rows))
    failed = [row for row in rows if row.error]
    if failed:
        raise ComputationFailure(f"integration failed for omega={failed[0].omega!r}: "
                                 f"{failed[0].error}")


def main() -> None:
    cli(prog_name="triplepower")


if __name__ == "__main__":
    sys.exit(main())
