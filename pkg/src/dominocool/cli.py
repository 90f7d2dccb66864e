"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 numerical or stability
error.  All numeric output is written with 17 significant digits so
files round-trip exactly.
"""

from __future__ import annotations

import csv as _csv
import json
import math
import os
import sys

import click
import numpy as np

from . import chain, figures, oracle, sweep, twomode
from .errors import ConfigError, DominoError
from .params import ChainParams, chain_from, load_config

SOLVERS = ("quadrature", "exact", "lyapunov")

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit_error(exc: DominoError, json_errors: bool) -> int:
    code = EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_NUMERICAL
    if json_errors:
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "exit_code": code}
        click.echo(json.dumps(payload), err=True)
    else:
        click.echo(f"error ({type(exc).__name__}): {exc}", err=True)
    return code


def _threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("DOMINO_COOL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(
                f"DOMINO_COOL_THREADS must be an integer, got {env!r}"
            ) from None
    return 1


def _options(tol: float | None, threads: int | None) -> chain.QuadratureOptions:
    opts = chain.QuadratureOptions()
    if tol is not None:
        if tol <= 0:
            raise ConfigError(f"--tol must be positive, got {tol}")
        opts.tol = tol
    opts.workers = _threads(threads)
    return opts


def _load_base(config: str | None, figure: str | None, panel: str | None,
               n_res: int):
    if (config is None) == (figure is None):
        raise ConfigError("give exactly one of --config or --figure")
    if config is not None:
        return load_config(config)
    if figure == "fig2":
        return figures.fig2_chain()
    if figure in ("fig3", "fig4", "fig5"):
        return figures.fig3_chain() if figure != "fig3" else figures.fig3_physical()
    if figure == "fig6":
        return figures.fig6_chain(n_res)
    raise ConfigError(f"unknown figure {figure!r}")


def _write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


_common = [
    click.option("--json-errors", is_flag=True,
                 help="Emit machine-readable JSON errors on stderr."),
]


def _add_common(cmd):
    for deco in _common:
        cmd = deco(cmd)
    return cmd


@click.group()
def main() -> None:
    """Cooling analysis for a feedback-damped mechanical-resonator chain."""


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--solver", type=click.Choice(SOLVERS + ("all",)),
              default="quadrature", show_default=True)
@click.option("--tol", type=float, default=None,
              help="Absolute quadrature tolerance on each variance.")
@click.option("--threads", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_add_common
def cool(config, solver, tol, threads, fmt, out, json_errors):
    """Final mean phonon numbers from one or all solvers."""
    try:
        opts = _options(tol, threads)
        p = chain_from(load_config(config))
        names = list(SOLVERS) if solver == "all" else [solver]
        results = {}
        for name in names:
            r = chain.solve(p, name, opts)
            results[name] = list(r.n_f)
            click.echo(
                f"{name}: " + "  ".join(
                    f"n_f_{j + 1} = {_fmt(v)}" for j, v in enumerate(r.n_f)
                )
            )
        if len(names) > 1:
            for i, a in enumerate(names):
                for b in names[i + 1:]:
                    diff = max(
                        abs(x - y) / max(abs(y), 1e-300)
                        for x, y in zip(results[a], results[b])
                    )
                    click.echo(f"max |{a} - {b}| / |{b}| = {diff:.3e}")
        if out is not None:
            payload = {"solvers": results}
            if fmt == "json":
                _write_output(json.dumps(payload, indent=2) + "\n", out)
            else:
                import io

                buf = io.StringIO()
                w = _csv.writer(buf, lineterminator="\n")
                w.writerow(["solver"] + [f"n_f_{j + 1}" for j in range(p.N)])
                for name in names:
                    w.writerow([name] + [_fmt(v) for v in results[name]])
                _write_output(buf.getvalue(), out)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


def _omega_grid(omega_min, omega_max, omega_points):
    if omega_max <= omega_min:
        raise ConfigError("--omega-max must exceed --omega-min")
    if omega_points < 2:
        raise ConfigError("--omega-points must be at least 2")
    return np.linspace(omega_min, omega_max, omega_points)


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--omega-min", type=float, default=0.0, show_default=True)
@click.option("--omega-max", type=float, default=2.0, show_default=True)
@click.option("--omega-points", type=int, default=201, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_add_common
def spectra(config, omega_min, omega_max, omega_points, fmt, out, json_errors):
    """Sample the position fluctuation spectra on a frequency grid."""
    try:
        p = chain_from(load_config(config))
        grid = _omega_grid(omega_min, omega_max, omega_points)
        table = sweep.SweepTable(
            axis_names=("omega",),
            n_names=tuple(f"S_q_{j + 1}" for j in range(p.N)),
        )
        for w in grid:
            resp = chain.assemble_response(p, float(w))
            vals = (np.abs(resp.transfer) ** 2) @ resp.input_psd
            table.rows.append(
                sweep.SweepRow(
                    axis_values=(float(w),),
                    n_f=tuple(float(v) for v in vals),
                    stable=True,
                )
            )
        _write_output(sweep.format_table(table, fmt), out)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--omega-min", type=float, default=0.0, show_default=True)
@click.option("--omega-max", type=float, default=2.0, show_default=True)
@click.option("--omega-points", type=int, default=201, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_add_common
def response(config, omega_min, omega_max, omega_points, fmt, out, json_errors):
    """Effective resonance frequencies and dampings versus frequency."""
    try:
        p = chain_from(load_config(config))
        grid = _omega_grid(omega_min, omega_max, omega_points)
        table = sweep.SweepTable(
            axis_names=("omega",),
            n_names=("Omega_eff_1", "Omega_eff_2", "Gamma_eff_1", "Gamma_eff_2"),
        )
        for w in grid:
            resp = twomode.effective_response(p, float(w))
            table.rows.append(
                sweep.SweepRow(
                    axis_values=(float(w),),
                    n_f=resp.Omega_eff + resp.Gamma_eff,
                    stable=True,
                )
            )
        _write_output(sweep.format_table(table, fmt), out)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command(name="sweep")
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--figure", "figure_name",
              type=click.Choice(figures.FIGURES), default=None,
              help="Use a bundled figure parameter set as the base.")
@click.option("--panel", default=None)
@click.option("--N", "n_res", type=int, default=3, show_default=True)
@click.option("--axis", default=None, help="Swept parameter path.")
@click.option("--start", type=float, default=None)
@click.option("--stop", type=float, default=None)
@click.option("--points", type=int, default=41, show_default=True)
@click.option("--scale", type=click.Choice(("lin", "log")), default="lin",
              show_default=True)
@click.option("--axis2", default=None)
@click.option("--start2", type=float, default=None)
@click.option("--stop2", type=float, default=None)
@click.option("--points2", type=int, default=None)
@click.option("--solver", type=click.Choice(SOLVERS), default="quadrature",
              show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--replay", type=click.Path(exists=True, dir_okay=False),
              default=None,
              help="Re-evaluate the axis points of an existing CSV table.")
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_add_common
def sweep_cmd(config, figure_name, panel, n_res, axis, start, stop, points,
              scale, axis2, start2, stop2, points2, solver, tol, threads,
              replay, fmt, out, json_errors):
    """Sweep final phonon numbers over a 1D or 2D parameter grid."""
    try:
        opts = _options(tol, threads)
        base = _load_base(config, figure_name, panel, n_res)
        if replay is not None:
            with open(replay, newline="", encoding="utf-8") as fh:
                reader = _csv.reader(fh)
                header = next(reader)
                n_axes = sum(1 for h in header if not h.startswith(("n_f_", "S_", "Omega_", "Gamma_", "stable", "error")))
                axis_names = tuple(header[:n_axes])
                pts = [tuple(float(v) for v in row[:n_axes]) for row in reader]
            table = sweep.evaluate_points(axis_names, pts, base, solver, opts)
        else:
            if axis is None or start is None or stop is None:
                raise ConfigError("sweep needs --axis, --start and --stop")
            ax1 = sweep.Axis(axis, start, stop, points, scale)
            ax2 = None
            if axis2 is not None:
                if start2 is None or stop2 is None:
                    raise ConfigError("--axis2 needs --start2 and --stop2")
                ax2 = sweep.Axis(axis2, start2, stop2, points2 or points, scale)
            table = sweep.run_sweep(
                sweep.SweepSpec(axis1=ax1, axis2=ax2, solver=solver), base, opts
            )
        _write_output(sweep.format_table(table, fmt), out)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--figure", "figure_name",
              type=click.Choice(figures.FIGURES), default=None)
@click.option("--panel", default=None)
@click.option("--N", "n_res", type=int, default=3, show_default=True)
@click.option("--axis", required=True)
@click.option("--bracket", type=float, nargs=2, required=True)
@click.option("--solver", type=click.Choice(SOLVERS), default="exact",
              show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--threads", type=int, default=None)
@_add_common
def switch(config, figure_name, panel, n_res, axis, bracket, solver, tol,
           threads, json_errors):
    """Locate the symmetric-cooling point n_1 = n_2 along one axis."""
    try:
        opts = _options(tol, threads)
        base = _load_base(config, figure_name, panel, n_res)
        sp = sweep.find_switch_point(axis, bracket, base, solver, opts)
        click.echo(f"switch point: {axis} = {_fmt(sp.value)}")
        click.echo(
            f"n_f_1 = {_fmt(sp.n_f[0])}  n_f_2 = {_fmt(sp.n_f[1])}  "
            f"residual = {sp.residual:.3e}  iterations = {sp.iterations}"
        )
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--figure", "figure_name",
              type=click.Choice(figures.FIGURES), default=None)
@click.option("--panel", default=None)
@click.option("--N", "n_res", type=int, default=3, show_default=True)
@click.option("--objective", type=click.Choice(("max", "n1", "mean")),
              default="max", show_default=True)
@click.option("--param", "params", type=(str, float, float), multiple=True,
              required=True, help="Bounded parameter: NAME LO HI (repeatable).")
@click.option("--solver", type=click.Choice(SOLVERS), default="quadrature",
              show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--threads", type=int, default=None)
@_add_common
def optimize(config, figure_name, panel, n_res, objective, params, solver,
             tol, threads, json_errors):
    """Minimize a phonon-number objective over box-bounded parameters."""
    try:
        opts = _options(tol, threads)
        base = _load_base(config, figure_name, panel, n_res)
        bounds = {name: (lo, hi) for name, lo, hi in params}
        best = sweep.optimize_cooling(objective, bounds, base, solver, opts)
        for name, v in best.params.items():
            click.echo(f"{name} = {_fmt(v)}")
        click.echo(f"objective ({objective}) = {_fmt(best.value)}")
        click.echo(
            "n_f = " + "  ".join(_fmt(v) for v in best.n_f)
            + f"  ({best.evaluations} evaluations, {best.starts} starts)"
        )
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command()
@click.argument("name", type=click.Choice(figures.FIGURES))
@click.option("--panel", default=None)
@click.option("--N", "n_res", type=int, default=3, show_default=True)
@click.option("--points", type=int, default=41, show_default=True)
@click.option("--solver", type=click.Choice(SOLVERS), default="exact",
              show_default=True)
@click.option("--tol", type=float, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_add_common
def figure(name, panel, n_res, points, solver, tol, threads, fmt, out,
           json_errors):
    """Regenerate the data grid behind one reference figure panel."""
    try:
        opts = _options(tol, threads)
        table = figures.figure_table(
            name, panel=panel, N=n_res, points=points, solver=solver, opts=opts
        )
        _write_output(sweep.format_table(table, fmt), out)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              required=True)
@_add_common
def stability(config, json_errors):
    """Print the stability report for a parameter set."""
    try:
        p = chain_from(load_config(config))
        report = chain.stability_check(p)
        click.echo(report.describe())
        if not report.stable:
            sys.exit(EXIT_NUMERICAL)
    except DominoError as exc:
        sys.exit(_emit_error(exc, json_errors))


if __name__ == "__main__":
    main()
