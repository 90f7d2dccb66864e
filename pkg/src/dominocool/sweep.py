"""Parameter sweeps, switch-point root finding and optimal-cooling search.

Sweeps accept either parameter set: physical bases re-run the
dimensionless conversion at every grid point (so sweeping the laser
power changes the optomechanical coupling), while dimensionless bases
are modified in place.  Every grid point is evaluated independently and
failures (instability, buckling) are recorded per row instead of
aborting the sweep.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import chain
from .errors import (
    BracketError,
    ConfigError,
    DominoError,
    OptimizationError,
)
from .params import ChainParams, PhysicalParams, chain_from, validate_chain

SWITCH_RESIDUAL = 1e-6
SWITCH_MAX_ITER = 200

_SCALAR_FIELDS_CHAIN = {"kappa", "G", "g_cd", "omega_fb", "zeta"}
_SCALAR_FIELDS_PHYS = {"kappa", "P_L", "omega_L", "omega_c", "L", "g_cd",
                       "omega_fb", "zeta"}
_VECTOR_FIELDS_CHAIN = {"omega_j", "gamma_j", "eta_tilde_j", "nbar_j"}
_VECTOR_FIELDS_PHYS = {"m_j", "omega_tilde_j", "eta_j", "gamma_j", "nbar_j"}


def set_param(base, path: str, value: float):
    """Return a copy of ``base`` with the parameter at ``path`` replaced.

    Paths are plain field names (``kappa``, ``P_L``), 1-based indexed
    entries of vector fields (``eta_tilde_1``, ``omega_2``, ``gamma_1``)
    or the frequency ratio ``omega_2/omega_1`` which rescales omega_2
    while holding omega_1 fixed.
    """
    value = float(value)
    is_chain = isinstance(base, ChainParams)
    scalars = _SCALAR_FIELDS_CHAIN if is_chain else _SCALAR_FIELDS_PHYS
    vectors = _VECTOR_FIELDS_CHAIN if is_chain else _VECTOR_FIELDS_PHYS

    if path == "omega_2/omega_1":
        if not is_chain:
            raise ConfigError(
                "frequency-ratio sweeps require a dimensionless base"
            )
        if base.N < 2:
            raise ConfigError("omega_2/omega_1 requires at least two resonators")
        w = list(base.omega_j)
        w[1] = value * w[0]
        return replace(base, omega_j=tuple(w))

    if path in scalars:
        return replace(base, **{path: value})

    # indexed entry of a vector field, 1-based: e.g. eta_tilde_1, nbar_2
    stem, _, idx_text = path.rpartition("_")
    if stem and idx_text.isdigit():
        name = stem + "_j"
        if name in vectors:
            idx = int(idx_text) - 1
            vec = list(getattr(base, name))
            if not 0 <= idx < len(vec):
                raise ConfigError(
                    f"index {idx + 1} out of range for {name} of length {len(vec)}"
                )
            vec[idx] = value
            return replace(base, **{name: tuple(vec)})

    kind = "dimensionless" if is_chain else "physical"
    raise ConfigError(f"unknown sweep parameter {path!r} for a {kind} base")


@dataclass(frozen=True)
class Axis:
    path: str
    start: float
    stop: float
    points: int
    scale: str = "lin"

    def grid(self) -> np.ndarray:
        if self.scale == "lin":
            return np.linspace(self.start, self.stop, self.points)
        return np.geomspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis | None = None
    solver: str = "quadrature"


def _validate_axis(ax: Axis) -> None:
    if not (math.isfinite(ax.start) and math.isfinite(ax.stop)):
        raise ConfigError(f"axis {ax.path}: range must be finite")
    if ax.start == ax.stop:
        raise ConfigError(f"axis {ax.path}: zero-length range")
    if ax.points < 2:
        raise ConfigError(f"axis {ax.path}: need at least 2 points")
    if ax.scale not in ("lin", "log"):
        raise ConfigError(f"axis {ax.path}: scale must be 'lin' or 'log'")
    if ax.scale == "log" and (ax.start <= 0 or ax.stop <= 0):
        raise ConfigError(f"axis {ax.path}: log scale needs positive bounds")


@dataclass
class SweepRow:
    axis_values: tuple[float, ...]
    n_f: tuple[float, ...] | None
    stable: bool
    error: str | None = None


@dataclass
class SweepTable:
    axis_names: tuple[str, ...]
    n_names: tuple[str, ...]
    rows: list[SweepRow] = field(default_factory=list)


def _evaluate(base, assignments, solver: str,
              opts: chain.QuadratureOptions | None) -> SweepRow:
    axis_vals = tuple(v for _, v in assignments)
    try:
        p = base
        for path, v in assignments:
            p = set_param(p, path, v)
        cp = chain_from(p)
        validate_chain(cp)
        result = chain.solve(cp, solver, opts)
        return SweepRow(axis_values=axis_vals, n_f=result.n_f, stable=True)
    except DominoError as exc:
        return SweepRow(axis_values=axis_vals, n_f=None, stable=False,
                        error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, base,
              opts: chain.QuadratureOptions | None = None) -> SweepTable:
    """Evaluate final phonon numbers over a 1D or 2D parameter grid.

    Rows are emitted in grid order (axis2 fastest); unstable or invalid
    points are recorded with ``stable=False`` and an error message.
    """
    _validate_axis(spec.axis1)
    if spec.axis2 is not None:
        _validate_axis(spec.axis2)
    N = chain_from(base).N
    axis_names = (spec.axis1.path,) + (
        (spec.axis2.path,) if spec.axis2 is not None else ()
    )
    table = SweepTable(
        axis_names=axis_names,
        n_names=tuple(f"n_f_{j + 1}" for j in range(N)),
    )
    grid1 = spec.axis1.grid()
    if spec.axis2 is None:
        for v1 in grid1:
            table.rows.append(
                _evaluate(base, [(spec.axis1.path, v1)], spec.solver, opts)
            )
    else:
        grid2 = spec.axis2.grid()
        for v1 in grid1:
            for v2 in grid2:
                table.rows.append(
                    _evaluate(
                        base,
                        [(spec.axis1.path, v1), (spec.axis2.path, v2)],
                        spec.solver,
                        opts,
                    )
                )
    return table


def evaluate_points(axis_names: tuple[str, ...], points, base,
                    solver: str = "quadrature",
                    opts: chain.QuadratureOptions | None = None) -> SweepTable:
    """Evaluate phonon numbers at an explicit list of grid points.

    Used to replay a previously written sweep or figure table: each entry
    of ``points`` is a tuple of axis values matching ``axis_names``.
    """
    N = chain_from(base).N
    table = SweepTable(
        axis_names=tuple(axis_names),
        n_names=tuple(f"n_f_{j + 1}" for j in range(N)),
    )
    for vals in points:
        assignments = list(zip(axis_names, (float(v) for v in vals)))
        table.rows.append(_evaluate(base, assignments, solver, opts))
    return table


def write_csv(table: SweepTable, fh) -> None:
    """Write a sweep table as CSV with full-precision numbers."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(list(table.axis_names) + list(table.n_names) + ["stable", "error"])
    for row in table.rows:
        n_cols = (
            [f"{v:.17g}" for v in row.n_f]
            if row.n_f is not None
            else [""] * len(table.n_names)
        )
        w.writerow(
            [f"{v:.17g}" for v in row.axis_values]
            + n_cols
            + [str(row.stable).lower(), row.error or ""]
        )


def write_json(table: SweepTable, fh) -> None:
    records = []
    for row in table.rows:
        rec = dict(zip(table.axis_names, row.axis_values))
        rec["n_f"] = list(row.n_f) if row.n_f is not None else None
        rec["stable"] = row.stable
        if row.error:
            rec["error"] = row.error
        records.append(rec)
    json.dump({"axes": list(table.axis_names), "rows": records}, fh, indent=2)
    fh.write("\n")


def format_table(table: SweepTable, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        write_csv(table, buf)
    elif fmt == "json":
        write_json(table, buf)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    return buf.getvalue()


# --------------------------------------------------------------------------
# Switch point: parameter value where the two occupancies coincide.


@dataclass(frozen=True)
class SwitchPoint:
    value: float
    bracket: tuple[float, float]
    residual: float
    n_f: tuple[float, float]
    iterations: int


def find_switch_point(axis: str, bracket: tuple[float, float], base,
                      solver: str = "exact",
                      opts: chain.QuadratureOptions | None = None) -> SwitchPoint:
    """Bisect for the symmetric-cooling point n_1 = n_2 along one axis.

    The difference n_1 - n_2 must change sign over the bracket; bisection
    stops once |n_1 - n_2| <= 1e-6 * max(n_1, n_2) or after 200 steps.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ConfigError(f"invalid bracket [{lo}, {hi}]")

    def eval_at(x: float):
        p = chain_from(set_param(base, axis, x))
        if p.N != 2:
            raise ConfigError("switch points are defined for two resonators")
        r = chain.solve(p, solver, opts)
        return r.n_f[0] - r.n_f[1], r.n_f

    f_lo, n_lo = eval_at(lo)
    f_hi, n_hi = eval_at(hi)
    if f_lo == 0.0 and f_hi == 0.0:
        raise BracketError(
            f"no sign change of n_1 - n_2 over [{lo:.6g}, {hi:.6g}]: "
            "the occupancies are identical at both ends"
        )
    if f_lo * f_hi > 0.0:
        raise BracketError(
            f"n_1 - n_2 does not change sign over [{lo:.6g}, {hi:.6g}] "
            f"(f(lo)={f_lo:.3e}, f(hi)={f_hi:.3e})"
        )

    best = (lo, f_lo, n_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi, n_hi)
    iters = 0
    a, fa = lo, f_lo
    b = hi
    for iters in range(1, SWITCH_MAX_ITER + 1):
        mid = 0.5 * (a + b)
        fm, nm = eval_at(mid)
        if abs(fm) < abs(best[1]):
            best = (mid, fm, nm)
        if abs(fm) <= SWITCH_RESIDUAL * max(nm):
            break
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    value, resid, n_f = best
    if abs(resid) > SWITCH_RESIDUAL * max(n_f):
        raise BracketError(
            f"bisection did not reach the residual target: |n_1 - n_2| = "
            f"{abs(resid):.3e} after {iters} iterations"
        )
    return SwitchPoint(value=value, bracket=(lo, hi), residual=abs(resid),
                       n_f=n_f, iterations=iters)


# --------------------------------------------------------------------------
# Optimal cooling: bounded derivative-free search.


@dataclass(frozen=True)
class Optimum:
    params: dict[str, float]
    value: float
    n_f: tuple[float, ...]
    evaluations: int
    starts: int


_OBJECTIVES = {
    "max": lambda n: max(n),
    "n1": lambda n: n[0],
    "mean": lambda n: sum(n) / len(n),
}

# fixed multi-start lattice (fractions of each box edge), deterministic
_START_FRACTIONS = (0.25, 0.5, 0.75)


def optimize_cooling(objective, bounds: dict[str, tuple[float, float]], base,
                     solver: str = "quadrature",
                     opts: chain.QuadratureOptions | None = None) -> Optimum:
    """Minimize a phonon-number objective over box-bounded parameters.

    ``objective`` is one of ``max`` (worst resonator), ``n1``, ``mean``,
    or a callable on the tuple of phonon numbers.  Unstable or invalid
    points score +inf; the search is a deterministic multi-start
    Nelder-Mead simplex restricted to the box.
    """
    if callable(objective):
        score = objective
    else:
        try:
            score = _OBJECTIVES[objective]
        except KeyError:
            raise ConfigError(
                f"unknown objective {objective!r}; choose from "
                f"{sorted(_OBJECTIVES)} or pass a callable"
            ) from None
    if not bounds:
        raise ConfigError("optimize_cooling needs at least one bounded parameter")
    names = list(bounds)
    lo = np.array([bounds[k][0] for k in names], dtype=float)
    hi = np.array([bounds[k][1] for k in names], dtype=float)
    if np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)) or np.any(lo >= hi):
        raise ConfigError("bounds must be finite with lower < upper")

    nev = 0

    def cost(x: np.ndarray) -> float:
        nonlocal nev
        nev += 1
        if np.any(x < lo) or np.any(x > hi):
            return math.inf
        try:
            p = base
            for name, v in zip(names, x):
                p = set_param(p, name, float(v))
            r = chain.solve(chain_from(p), solver, opts)
        except DominoError:
            return math.inf
        return float(score(r.n_f))

    ndim = len(names)
    if ndim == 1:
        starts = [lo + f * (hi - lo) for f in _START_FRACTIONS]
    else:
        # corner-leaning lattice: one centred start plus one start biased
        # toward each face, capped to keep evaluation counts modest
        starts = [lo + 0.5 * (hi - lo)]
        for k in range(ndim):
            for f in (0.25, 0.75):
                x = lo + 0.5 * (hi - lo)
                x[k] = lo[k] + f * (hi[k] - lo[k])
                starts.append(x)

    best_x = None
    best_val = math.inf
    for x0 in starts:
        if not math.isfinite(cost(x0)):
            continue
        res = minimize(
            cost,
            x0,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 400 * ndim},
        )
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = np.asarray(res.x, dtype=float)
    if best_x is None or not math.isfinite(best_val):
        raise OptimizationError("every start point was unstable or invalid")

    p = base
    for name, v in zip(names, best_x):
        p = set_param(p, name, float(v))
    final = chain.solve(chain_from(p), solver, opts)
    return Optimum(
        params=dict(zip(names, (float(v) for v in best_x))),
        value=best_val,
        n_f=final.n_f,
        evaluations=nev,
        starts=len(starts),
    )
