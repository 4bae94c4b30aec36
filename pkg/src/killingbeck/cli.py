"""Command-line front end: ``killingbeck {spectrum,verify,wavefunction,fit}``.

Exit codes: 0 success (reported discrepancies included), 2 usage or config
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError

from . import closed_form as cf
from .config import FORMATS, ConfigError, RunConfig, load_config, parse_channel
from .laplace_kernel import DivergenceError
from .model import Channel
from .oracle import ConvergenceError, RadialGrid, default_grid, oracle_eigenpair, oracle_eigenvalues, quadrature_norm
from .quarkonium import FitProblem, fit_parameters, rms_radius_fm
from .verification import verify_channel

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3
SIG_DIGITS = 12

Row = dict


def fmt_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, f".{SIG_DIGITS}g")
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(fmt_number(x))
        return v if math.isfinite(v) else fmt_number(x)
    return x


def render(rows: Sequence[Row], fmt: str, columns: Optional[Sequence[str]] = None) -> str:
    columns = list(columns or (rows[0].keys() if rows else []))
    if fmt == "json-lines":
        return "".join(json.dumps({k: _json_value(r[k]) for k in columns}) + "\n" for r in rows)
    cells = [[fmt_number(r[k]) for k in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue()
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _grid(config: RunConfig, ch: Channel) -> RadialGrid:
    kwargs = {} if config.grid_steps is None else {"steps": config.grid_steps}
    try:
        return default_grid(config.potential, ch, r_max=config.rmax, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _per_channel(func, channels: Iterable[Channel]) -> list:
    # results come back in config order regardless of completion order
    with ThreadPoolExecutor() as pool:
        return list(pool.map(func, channels))


def _channel_fields(ch: Channel) -> Row:
    return {"n": ch.n, "l": ch.l, "N": ch.dim}


def cmd_spectrum(config: RunConfig) -> list[Row]:
    p = config.potential

    def row(ch: Channel) -> Row:
        e_closed = cf.energy_eigenvalue(ch, p)
        e_oracle = float(oracle_eigenvalues(p, ch, ch.n + 1, grid=_grid(config, ch))[ch.n])
        res = cf.identity_residuals(ch, p)
        return {
            **_channel_fields(ch),
            "E_closed": e_closed,
            "E_oracle": e_oracle,
            "abs_delta": abs(e_closed - e_oracle),
            "res_pole_order": res.pole_order,
            "res_coulomb": res.coulomb,
            "res_energy": res.energy,
        }

    return _per_channel(row, config.channels)


def cmd_verify(config: RunConfig) -> list[Row]:
    def rows(ch: Channel) -> list[Row]:
        report = verify_channel(ch, config.potential, grid=_grid(config, ch))
        return [
            {
                **_channel_fields(ch),
                "check": c.name,
                "status": c.status,
                "value": c.value,
                "tolerance": "" if c.tolerance is None else c.tolerance,
                "note": c.note,
            }
            for c in report.checks
        ]

    return [r for chunk in _per_channel(rows, config.channels) for r in chunk]


def parse_r_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"r-range must be START:STOP:COUNT, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"r-range must be START:STOP:COUNT, got {text!r}") from None
    if count < 1 or not start <= stop:
        raise ConfigError(f"empty r-range {text!r}")
    return start, stop, count


def cmd_wavefunction(config: RunConfig, ch: Channel, r_range: Optional[tuple[float, float, int]] = None) -> list[Row]:
    """Closed-form R next to the oracle state n of the same channel.

    The oracle u is mapped to R = u / r^((N-1)/2), scaled to the closed form's
    own quadrature norm and sign-aligned by overlap.
    """
    p = config.potential
    grid = _grid(config, ch)
    start, stop, count = r_range or (grid.h, 0.5 * grid.r_max, 41)
    if not (0 < start and stop <= grid.r_max):
        raise ConfigError(f"r-range [{start}, {stop}] outside the grid (0, {grid.r_max:.12g}]")
    R = cf.radial_wavefunction(ch, p)
    _, u = oracle_eigenpair(p, ch, grid=grid)
    pts = grid.points
    overlap = float(np.sum(R(pts) * u.values * pts ** ((ch.dim - 1) / 2.0)))
    scale = math.copysign(math.sqrt(quadrature_norm(R, ch, grid)), overlap or 1.0)
    r = np.linspace(start, stop, count)
    closed = np.asarray(R(r))
    oracle = scale * u.radial(ch.dim, r)
    return [{"r": float(x), "R_closed": float(a), "R_oracle": float(b)} for x, a, b in zip(r, closed, oracle)]


def cmd_fit(config: RunConfig) -> list[Row]:
    if not config.observations:
        raise ConfigError("fit needs observations = n,l,mass; ...")
    system = config.quark_system()
    try:
        problem = FitProblem(tuple(config.observations), config.free, config.bounds)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = fit_parameters(problem, system, seed=config.seed)
    fitted = system.with_params(a=result.params.a, b=result.params.b, c=result.params.c)
    return [
        {
            **_channel_fields(s.channel),
            "observed": s.observed,
            "predicted": s.predicted,
            "residual": s.residual,
            "rms_fm": rms_radius_fm(fitted, s.channel),
            "a": result.params.a,
            "b": result.params.b,
            "c": result.params.c,
            "objective": result.objective,
            "converged": result.converged,
        }
        for s in result.residuals
    ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="killingbeck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "closed-form vs oracle energies"),
        ("verify", "full closed-form check battery"),
        ("wavefunction", "sampled closed-form and oracle radial functions"),
        ("fit", "fit potential strengths to observed masses"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="key = value config file")
        cmd.add_argument("--format", choices=FORMATS)
        cmd.add_argument("--out", help="output path (default stdout)")
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--grid-steps", type=int)
        cmd.add_argument("--rmax", type=float)
        if name == "wavefunction":
            cmd.add_argument("--channel", required=True, help="n,l or n,l,N")
            cmd.add_argument("--r-range", help="START:STOP:COUNT")
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = load_config(args.config)
        for key in ("format", "seed", "grid_steps", "rmax"):
            value = getattr(args, key)
            if value is not None:
                setattr(config, key, value)
        if args.command == "spectrum":
            rows, columns = cmd_spectrum(config), None
        elif args.command == "verify":
            rows, columns = cmd_verify(config), None
        elif args.command == "wavefunction":
            ch = parse_channel(args.channel, config.channels[0].dim)
            r_range = parse_r_range(args.r_range) if args.r_range else None
            rows, columns = cmd_wavefunction(config, ch, r_range), ["r", "R_closed", "R_oracle"]
        else:
            rows, columns = cmd_fit(config), None
        text = render(rows, config.format, columns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, DivergenceError, OverflowError, LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
