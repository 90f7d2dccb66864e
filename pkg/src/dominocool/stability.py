"""Stability verdicts for the linear drift dynamics.

Two independent routes are provided: eigenvalues of the real drift
matrix, and (for the two-resonator chain) a Routh-Hurwitz table on the
degree-6 characteristic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class StabilityReport:
    stable: bool
    max_real_part: float
    eigenvalues: np.ndarray = field(repr=False)
    char_poly: np.ndarray | None = None
    routh_hurwitz: bool | None = None

    def describe(self) -> str:
        verdict = "stable" if self.stable else "UNSTABLE"
        msg = f"{verdict}: max Re(eigenvalue) = {self.max_real_part:.6e}"
        if self.routh_hurwitz is not None:
            msg += f"; Routh-Hurwitz: {'pass' if self.routh_hurwitz else 'fail'}"
        return msg


def drift_report(A: np.ndarray) -> StabilityReport:
    """Eigenvalue stability verdict for a real drift matrix."""
    eigs = np.linalg.eigvals(np.asarray(A, dtype=float))
    max_re = float(eigs.real.max())
    return StabilityReport(stable=max_re < 0.0, max_real_part=max_re, eigenvalues=eigs)


def routh_hurwitz_stable(coeffs) -> bool:
    """Routh-Hurwitz test on a real polynomial (descending coefficients).

    Returns True iff all roots lie strictly in the open left half plane.
    Marginal rows (zero pivots) are treated as unstable.
    """
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "f")
    if c.size == 0:
        return False
    if c[0] < 0:
        c = -c
    # A Hurwitz polynomial has all coefficients strictly positive.
    if np.any(c <= 0):
        return False
    n = c.size - 1
    if n == 0:
        return True
    rows = [c[0::2].copy(), c[1::2].copy()]
    width = rows[0].size
    rows[1] = np.pad(rows[1], (0, width - rows[1].size))
    for _ in range(n - 1):
        top, bot = rows[-2], rows[-1]
        if bot[0] == 0.0:
            return False
        new = np.zeros(width)
        for k in range(width - 1):
            new[k] = (bot[0] * top[k + 1] - top[0] * bot[k + 1]) / bot[0]
        rows.append(new)
    first_col = np.array([r[0] for r in rows])
    return bool(np.all(first_col > 0.0))
