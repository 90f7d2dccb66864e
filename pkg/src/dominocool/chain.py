"""General-N frequency-domain solver.

The linearized loop is solved exactly in frequency space: the cavity
quadratures and the feedback kernel are rational transfer functions, so
each position fluctuation is a linear combination of the vacuum inputs,
the detection noise and the thermal forces.  Phonon numbers follow from
adaptive quadrature of the position and momentum spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from . import oracle, twomode
from .errors import NumericalError, PoleError, StabilityError
from .params import ChainParams, validate_chain
from .stability import StabilityReport, drift_report
from .twomode import thermal_force_psd


@dataclass
class FrequencyResponse:
    """Transfer matrix from the noise inputs to the positions at one
    frequency.

    Input ordering: ``(X_in, Y_in, Y_upsilon, xi_1..xi_N)``; the three
    optical inputs carry a flat PSD of 1/2 per quadrature.
    """

    omega: float
    transfer: np.ndarray  # (N, 3 + N) complex
    input_psd: np.ndarray  # (3 + N,) real


@dataclass
class QuadratureOptions:
    tol: float = 1e-9          # absolute tolerance on each variance
    rel_tol: float = 1e-10
    max_nodes: int = 500_000
    cutoff: float = 1e6        # high-frequency cutoff, full-coth mode only
    workers: int = 1


@dataclass
class CoolingResult:
    n_f: tuple[float, ...]
    solver: str
    stability: StabilityReport
    quadrature_diag: dict | None = None


def feedback_kernel(p: ChainParams, omega) -> complex:
    """Fourier transform of the causal derivative feedback kernel."""
    return p.g_cd * (-1j * omega) * p.omega_fb / (p.omega_fb - 1j * omega)


def _system_matrix(p: ChainParams, omega):
    """Complex N x N matrix acting on the position vector."""
    w = np.asarray(p.omega_j)
    gam = np.asarray(p.gamma_j)
    M = np.diag((w**2 - omega**2 - 1j * omega * gam) / w).astype(complex)
    for j in range(p.N - 1):
        M[j, j + 1] = M[j + 1, j] = -2.0 * p.eta_tilde_j[j]
    M[0, 0] += p.G * feedback_kernel(p, omega) / (p.kappa - 1j * omega)
    return M


def _force_matrix(p: ChainParams, omega):
    """Complex N x (3 + N) coefficients of the noise inputs in the force
    balance for each position."""
    N = p.N
    dc = p.kappa - 1j * omega
    gt = feedback_kernel(p, omega)
    root2k = math.sqrt(2.0 * p.kappa)
    F = np.zeros((N, 3 + N), dtype=complex)
    F[0, 0] = p.G * root2k / dc
    F[0, 1] = gt * (1.0 / root2k - root2k / dc)
    F[0, 2] = gt * math.sqrt(1.0 / p.zeta - 1.0) / root2k
    for j in range(N):
        F[j, 3 + j] = 1.0
    return F


def _input_psd(p: ChainParams, omega) -> np.ndarray:
    psd = np.empty(3 + p.N)
    psd[:3] = 0.5
    for j in range(p.N):
        psd[3 + j] = thermal_force_psd(p, omega, j)
    return psd


def assemble_response(p: ChainParams, omega: float) -> FrequencyResponse:
    """Solve the frequency-domain system at a single probe frequency."""
    validate_chain(p)
    omega = float(omega)
    M = _system_matrix(p, omega)
    F = _force_matrix(p, omega)
    try:
        T = np.linalg.solve(M, F)
    except np.linalg.LinAlgError:
        raise PoleError(f"system is singular at omega = {omega:.6g}") from None
    if not np.all(np.isfinite(T)):
        raise PoleError(f"system is singular at omega = {omega:.6g}")
    return FrequencyResponse(omega=omega, transfer=T, input_psd=_input_psd(p, omega))


def spectrum(p: ChainParams, omega: float, j: int) -> float:
    """Position fluctuation spectrum of resonator ``j`` (0-based)."""
    resp = assemble_response(p, omega)
    return float(np.abs(resp.transfer[j]) ** 2 @ resp.input_psd)


def momentum_spectrum(p: ChainParams, omega: float, j: int) -> float:
    return omega**2 * spectrum(p, omega, j) / p.omega_j[j] ** 2


def _all_spectra(p: ChainParams, omega: float) -> np.ndarray:
    resp = assemble_response(p, omega)
    return (np.abs(resp.transfer) ** 2) @ resp.input_psd


def stability_check(p: ChainParams) -> StabilityReport:
    """Eigenvalue stability verdict; for N=2 cross-checked against the
    Routh-Hurwitz table of the closed-form characteristic polynomial."""
    validate_chain(p)
    model = oracle.build(_markovian(p))
    report = drift_report(model.drift)
    if p.N == 2:
        poly = twomode.hurwitz_polynomial(p)
        rh = twomode.is_stable_closed_form(p)
        report.char_poly = poly
        report.routh_hurwitz = rh
        if rh != report.stable and abs(report.max_real_part) > 1e-9:
            raise NumericalError(
                "stability verdicts disagree: eigenvalues say "
                f"{report.stable}, Routh-Hurwitz says {rh}"
            )
    return report


def _markovian(p: ChainParams) -> ChainParams:
    if p.thermal_mode == "markovian":
        return p
    from dataclasses import replace

    return replace(p, thermal_mode="markovian")


def _resonance_peaks(p: ChainParams) -> list[tuple[float, float]]:
    """(frequency, half-width) of the closed-loop resonances, from the
    drift eigenvalues of the augmented model."""
    eigs = np.linalg.eigvals(oracle.build(_markovian(p)).drift)
    peaks = []
    for lam in eigs:
        f = abs(lam.imag)
        if f > 1e-12:
            peaks.append((f, max(abs(lam.real), 1e-12 * max(f, 1.0))))
    peaks.sort()
    merged: list[tuple[float, float]] = []
    for f, w in peaks:
        if merged and abs(f - merged[-1][0]) < 1e-9 * max(f, 1.0):
            merged[-1] = (f, max(w, merged[-1][1]))
        else:
            merged.append((f, w))
    return merged


def _segments(p: ChainParams, peaks) -> tuple[list[float], float]:
    scale = max(p.kappa, p.omega_fb, max(p.omega_j))
    upper = 6.0 * scale + 10.0
    pts = {0.0, upper}
    for f, w in peaks:
        for c in (f - 30.0 * w, f - 3.0 * w, f, f + 3.0 * w, f + 30.0 * w):
            if 0.0 < c < upper:
                pts.add(c)
    return sorted(pts), upper


class _SpectraIntegrand:
    """Picklable integrand (position and omega^2-weighted spectra stacked),
    so quadrature panels can run in worker processes."""

    def __init__(self, p: ChainParams):
        self.p = p

    def __call__(self, w: float) -> np.ndarray:
        s = _all_spectra(self.p, w)
        return np.concatenate([s, w**2 * s])


def phonon_numbers(p: ChainParams, opts: QuadratureOptions | None = None) -> CoolingResult:
    """Final mean phonon numbers by spectral quadrature.

    The spectra are even in frequency, so the integrals run over the
    positive half line with interior break points anchored on every
    closed-loop resonance.  In full-coth mode the momentum integral is
    truncated at ``opts.cutoff`` (its tail grows only logarithmically,
    at order gamma_j).
    """
    validate_chain(p)
    opts = opts or QuadratureOptions()
    report = stability_check(p)
    if not report.stable:
        raise StabilityError(
            f"unstable parameters: max Re(eigenvalue) = {report.max_real_part:.6e}"
        )
    N = p.N
    wj2 = np.asarray(p.omega_j) ** 2
    integrand = _SpectraIntegrand(p)
    points, upper = _segments(p, _resonance_peaks(p))
    nseg = len(points)  # segments between break points, plus the tail
    epsabs = opts.tol * math.pi / (2.0 * nseg)
    total = np.zeros(2 * N)
    err = 0.0
    neval = 0
    res = quad_vec(
        integrand,
        0.0,
        upper,
        points=points,
        epsabs=epsabs * nseg / 2.0,
        epsrel=opts.rel_tol,
        limit=max(opts.max_nodes // 30, 200),
        norm="max",
        workers=opts.workers,
        full_output=True,
    )
    total += res[0]
    err += res[1]
    info = res[2]
    neval += info.neval
    if not info.success:
        raise NumericalError(
            f"quadrature failed to converge on [0, {upper:.3g}] "
            f"(error estimate {res[1]:.3e}, {info.neval} evaluations)"
        )
    tail_upper = np.inf if p.thermal_mode == "markovian" else opts.cutoff
    res = quad_vec(
        integrand,
        upper,
        tail_upper,
        epsabs=epsabs * nseg / 2.0,
        epsrel=opts.rel_tol,
        limit=max(opts.max_nodes // 30, 200),
        norm="max",
        workers=opts.workers,
        full_output=True,
    )
    total += res[0]
    err += res[1]
    neval += res[2].neval
    if not res[2].success:
        raise NumericalError("quadrature failed to converge on the tail segment")
    if neval > opts.max_nodes:
        raise NumericalError(f"quadrature used {neval} nodes > max_nodes")

    q_var = total[:N] / math.pi        # (1/2pi) * full-line integral
    p_var = total[N:] / (math.pi * wj2)
    n_f = 0.5 * (q_var + p_var - 1.0)
    diag = {"neval": neval, "error_estimate": err / math.pi, "upper": upper}
    return CoolingResult(
        n_f=tuple(n_f), solver="quadrature", stability=report, quadrature_diag=diag
    )


def solve(p: ChainParams, solver: str = "quadrature",
          opts: QuadratureOptions | None = None) -> CoolingResult:
    """Dispatch to one of the three phonon-number solvers."""
    if solver == "quadrature":
        return phonon_numbers(p, opts)
    if solver == "exact":
        report = stability_check(p)
        if not report.stable:
            raise StabilityError(
                f"unstable parameters: max Re(eigenvalue) = {report.max_real_part:.6e}"
            )
        n = twomode.exact_phonon_numbers(p)
        return CoolingResult(n_f=n, solver="exact", stability=report)
    if solver == "lyapunov":
        report = stability_check(p)
        if not report.stable:
            raise StabilityError(
                f"unstable parameters: max Re(eigenvalue) = {report.max_real_part:.6e}"
            )
        n = oracle.phonon_numbers(_markovian(p))
        return CoolingResult(n_f=tuple(n), solver="lyapunov", stability=report)
    raise ValueError(f"unknown solver {solver!r}")
