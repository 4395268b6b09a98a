"""Command-line front end.

By default each subcommand computes locally through the service handlers;
pass ``--server`` to send the validated config to a running instance of the
HTTP app instead.  Either way the result lands as CSV files plus a summary
line, so scripted callers see identical output.

Exit codes: 0 success, 1 bad configuration or parameters, 2 a verification
command found a failing check.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import httpx
import yaml
from pydantic import ValidationError

from .config import RunConfig, format_validation_error, load_config
from .errors import ConvergenceError, ParameterError
from .service import handlers
from .service.schemas import (
    EquilibriumResponse,
    OracleCheckResponse,
    SolveAuditorResponse,
    SweepResponse,
    VerifyDpResponse,
)


def _load(config_path: str) -> tuple[RunConfig, Path]:
    try:
        cfg = load_config(config_path)
    except ValidationError as err:
        click.echo(format_validation_error(err), err=True)
        sys.exit(1)
    except (ParameterError, OSError, yaml.YAMLError) as err:
        click.echo(str(err), err=True)
        sys.exit(1)
    return cfg, Path(config_path).resolve().parent


def _remote(server: str, endpoint: str, cfg: RunConfig, model):
    url = f"{server.rstrip('/')}/{endpoint}"
    try:
        resp = httpx.post(url, json=cfg.model_dump(mode="json"), timeout=300.0)
    except httpx.HTTPError as err:
        click.echo(f"request to {url} failed: {err}", err=True)
        sys.exit(1)
    if resp.status_code == 422:
        detail = resp.json().get("detail", [])
        for item in detail if isinstance(detail, list) else [detail]:
            loc = ".".join(str(p) for p in item.get("loc", [])) if isinstance(item, dict) else ""
            msg = item.get("msg", str(item)) if isinstance(item, dict) else str(item)
            click.echo(f"{loc}: {msg}" if loc else msg, err=True)
        sys.exit(1)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        click.echo(str(detail), err=True)
        sys.exit(1)
    return model.model_validate(resp.json())


def _dispatch(server, endpoint, model, handler, cfg, base_dir):
    if server:
        return _remote(server, endpoint, cfg, model)
    try:
        return handler(cfg, base_dir)
    except (ParameterError, ConvergenceError) as err:
        click.echo(str(err), err=True)
        sys.exit(1)


def _fmt(cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, bool):
        return "1" if cell else "0"
    if isinstance(cell, float):
        return "%.12g" % cell
    return str(cell)


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _out_dir(cfg: RunConfig, out: str | None) -> Path:
    path = Path(out) if out else Path(cfg.run.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _common(fn):
    fn = click.option(
        "--server", default=None, metavar="URL", help="Run against a service instead of locally."
    )(fn)
    fn = click.option("--out", "out", default=None, type=click.Path(file_okay=False))(fn)
    # No exists=True: click would exit 2 for a missing file, and exit 2 is
    # reserved for failed checks.  _load turns the OSError into exit 1.
    fn = click.option(
        "--config",
        "config_path",
        required=True,
        type=click.Path(dir_okay=False),
    )(fn)
    return fn


CONFIDENCE_COLUMNS = ("signal", "Q_g", "Q_b", "v", "r_g", "r_b", "chi", "phi")


@click.group()
def main() -> None:
    """Solvers and verification for the privacy-audit game."""


@main.command("solve-auditor")
@_common
def solve_auditor(config_path, out, server):
    """Audit confidence (and optionally the information strategy) for a fixed developer."""
    cfg, base_dir = _load(config_path)
    resp: SolveAuditorResponse = _dispatch(
        server, "solve-auditor", SolveAuditorResponse, handlers.handle_solve_auditor, cfg, base_dir
    )
    target = _out_dir(cfg, out)
    _write_csv(
        target / "confidence.csv",
        CONFIDENCE_COLUMNS,
        [(r.signal, r.Q_g, r.Q_b, r.v, r.r_g, r.r_b, r.chi, r.phi) for r in resp.confidence],
    )
    if resp.info_strategy is not None:
        _write_csv(
            target / "info_strategy.csv",
            ("signal", "d_g", "d_b", "action", "posterior_g"),
            [(r.signal, r.d_g, r.d_b, r.action, r.posterior_g) for r in resp.info_strategy],
        )
        kind = "degenerate" if resp.info_degenerate else "partition"
        click.echo(f"information strategy: {kind}, value {_fmt(resp.info_value)}")
    click.echo(
        f"auditor value {_fmt(resp.auditor_value)} at lambda {cfg.auditor.lam:g}; "
        f"wrote {target / 'confidence.csv'}"
    )


@main.command("equilibrium")
@_common
@click.option(
    "--mode",
    type=click.Choice(["leader-enumeration", "iteration"]),
    default=None,
    help="Override run.mode from the config.",
)
def equilibrium(config_path, out, server, mode):
    """Stackelberg equilibrium of the full game."""
    cfg, base_dir = _load(config_path)
    if mode:
        cfg.run.mode = mode
    resp: EquilibriumResponse = _dispatch(
        server, "equilibrium", EquilibriumResponse, handlers.handle_equilibrium, cfg, base_dir
    )
    target = _out_dir(cfg, out)
    _write_csv(
        target / "equilibrium.csv",
        (
            "candidate",
            "epsilon",
            "accuracy_term",
            "evasion_rate",
            "developer_total",
            "auditor_value",
            "chosen",
        ),
        [
            (c.label, c.epsilon, c.accuracy_term, c.evasion_rate, c.total, c.auditor_value, c.chosen)
            for c in resp.candidates
        ],
    )
    if resp.converged is not None:
        state = "converged" if resp.converged else "did not converge"
        click.echo(f"iteration {state} after {len(resp.rounds or [])} rounds")
    click.echo(
        f"equilibrium epsilon {resp.epsilon:g}: developer_total {_fmt(resp.developer_total)}, "
        f"evasion_rate {_fmt(resp.evasion_rate)}, auditor_value {_fmt(resp.auditor_value)}"
    )


@main.command("sweep")
@_common
def sweep(config_path, out, server):
    """Sweep lambda or the hypothesis mass ratio; one CSV row per point."""
    cfg, base_dir = _load(config_path)
    resp: SweepResponse = _dispatch(
        server, "sweep", SweepResponse, handlers.handle_sweep, cfg, base_dir
    )
    target = _out_dir(cfg, out)
    _write_csv(target / "sweep.csv", resp.columns, resp.rows)
    click.echo(f"wrote {len(resp.rows)} {resp.parameter}-sweep rows to {target / 'sweep.csv'}")


@main.command("oracle-check")
@_common
def oracle_check(config_path, out, server):
    """Compare every closed form against its brute-force oracle."""
    cfg, base_dir = _load(config_path)
    resp: OracleCheckResponse = _dispatch(
        server, "oracle-check", OracleCheckResponse, handlers.handle_oracle_check, cfg, base_dir
    )
    for c in resp.checks:
        mark = "PASS" if c.passed else "FAIL"
        extra = f" ({c.detail})" if c.detail else ""
        click.echo(
            f"[{mark}] {c.name}: solver {_fmt(c.solver_value)} vs oracle {_fmt(c.oracle_value)}, "
            f"gap {c.gap:.3g}, tolerance {c.tolerance:.3g}{extra}"
        )
    if not resp.passed:
        click.echo("oracle check failed", err=True)
        sys.exit(2)
    click.echo("all oracle checks passed")


@main.command("verify-dp")
@_common
def verify_dp(config_path, out, server):
    """Check the privacy inequality for every budget on the grid."""
    cfg, base_dir = _load(config_path)
    resp: VerifyDpResponse = _dispatch(
        server, "verify-dp", VerifyDpResponse, handlers.handle_verify_dp, cfg, base_dir
    )
    for r in resp.rows:
        mark = "PASS" if r.satisfied else "FAIL"
        click.echo(
            f"[{mark}] epsilon {r.epsilon:g} shift {r.shift:g}: "
            f"max |log ratio| {_fmt(r.max_log_ratio)}, slack {r.slack:.3g}"
        )
    if not resp.passed:
        click.echo("privacy check failed", err=True)
        sys.exit(2)
    click.echo("privacy inequality holds on the whole grid")


if __name__ == "__main__":
    main()
