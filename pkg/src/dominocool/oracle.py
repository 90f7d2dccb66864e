"""State-space oracle: augmented drift/diffusion model and Lyapunov solve.

The non-Markovian feedback kernel is realized exactly by one auxiliary
low-pass filter state, so the steady-state covariance of the full loop
follows from a single continuous Lyapunov equation.  Only the flat
(markovian) bath convention admits this white-noise form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .errors import NumericalError, StabilityError, UnsupportedMode
from .params import ChainParams, validate_chain
from .stability import StabilityReport, drift_report

RESIDUAL_TOL = 1e-10


@dataclass
class AugmentedModel:
    """Linear model ``xdot = A x + B n`` with white noise ``n``.

    State ordering: ``(X, Y, q_1, p_1, ..., q_N, p_N, z)`` where ``z`` is
    the feedback filter state.  ``diffusion`` is ``B Sigma B^T`` for the
    symmetrized input correlations.
    """

    drift: np.ndarray
    diffusion: np.ndarray
    N: int = 0

    @property
    def dim(self) -> int:
        return self.drift.shape[0]


def _q_index(j: int) -> int:
    return 2 + 2 * j


def _p_index(j: int) -> int:
    return 3 + 2 * j


def build(p: ChainParams) -> AugmentedModel:
    """Assemble the augmented drift and diffusion matrices."""
    validate_chain(p)
    if p.thermal_mode != "markovian":
        raise UnsupportedMode(
            "state-space oracle supports only the markovian thermal mode"
        )
    N = p.N
    dim = 2 + 2 * N + 1
    iz = dim - 1
    k, G, g, wfb, zeta = p.kappa, p.G, p.g_cd, p.omega_fb, p.zeta
    w = p.omega_j
    gam = p.gamma_j
    eta = p.eta_tilde_j

    A = np.zeros((dim, dim))
    A[0, 0] = -k
    A[1, 1] = -k
    A[1, _q_index(0)] = G
    for j in range(N):
        A[_q_index(j), _p_index(j)] = w[j]
        A[_p_index(j), _q_index(j)] = -w[j]
        A[_p_index(j), _p_index(j)] = -gam[j]
        if j > 0:
            A[_p_index(j), _q_index(j - 1)] = 2.0 * eta[j - 1]
        if j < N - 1:
            A[_p_index(j), _q_index(j + 1)] = 2.0 * eta[j]
    A[_p_index(0), 0] = G
    # feedback force -g_cd * zdot, written out in state variables
    A[_p_index(0), 1] = -g * wfb
    A[_p_index(0), iz] = g * wfb
    A[iz, iz] = -wfb
    A[iz, 1] = wfb

    # noise inputs: X_in, Y_in, Y_upsilon, xi_1..xi_N
    nin = 3 + N
    B = np.zeros((dim, nin))
    root2k = math.sqrt(2.0 * k)
    excess = math.sqrt(1.0 / zeta - 1.0)
    B[0, 0] = root2k
    B[1, 1] = root2k
    B[_p_index(0), 1] = g * wfb / root2k
    B[_p_index(0), 2] = g * wfb * excess / root2k
    B[iz, 1] = -wfb / root2k
    B[iz, 2] = -wfb * excess / root2k
    for j in range(N):
        B[_p_index(j), 3 + j] = 1.0

    psd = np.empty(nin)
    psd[:3] = 0.5
    psd[3:] = [(2.0 * nb + 1.0) * gm for nb, gm in zip(p.nbar_j, gam)]
    D = B @ np.diag(psd) @ B.T
    return AugmentedModel(drift=A, diffusion=D, N=N)


def stability_report(m: AugmentedModel) -> StabilityReport:
    return drift_report(m.drift)


def steady_covariance(m: AugmentedModel) -> np.ndarray:
    """Solve ``A V + V A^T + D = 0`` for the steady-state covariance."""
    report = drift_report(m.drift)
    if not report.stable:
        raise StabilityError(
            f"drift matrix is not Hurwitz: max Re(eig) = {report.max_real_part:.6e}"
        )
    V = solve_continuous_lyapunov(m.drift, -m.diffusion)
    V = 0.5 * (V + V.T)
    residual = np.linalg.norm(m.drift @ V + V @ m.drift.T + m.diffusion)
    bound = RESIDUAL_TOL * max(np.linalg.norm(m.diffusion), 1e-300)
    if residual > bound:
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds bound {bound:.3e}"
        )
    return V


def phonon_numbers(p: ChainParams) -> np.ndarray:
    """Final mean phonon numbers from the steady-state covariance."""
    m = build(p)
    V = steady_covariance(m)
    n = np.empty(m.N)
    for j in range(m.N):
        n[j] = 0.5 * (V[_q_index(j), _q_index(j)] + V[_p_index(j), _p_index(j)] - 1.0)
    return n
