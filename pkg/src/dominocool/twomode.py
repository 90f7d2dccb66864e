"""Closed-form analytics for the two-resonator chain.

Everything in this module is algebra evaluated at machine precision:
effective susceptibilities and dampings, the resonant cooling rates, the
per-channel noise spectra, and the exact steady-state phonon numbers
obtained from the degree-6 characteristic coefficients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, StabilityError
from .params import ChainParams
from .stability import routh_hurwitz_stable

IM_TOL = 1e-9  # tolerated relative imaginary residue on phonon numbers


@dataclass(frozen=True)
class EffectiveResponse:
    omega: float
    Omega_eff: tuple[float, float]
    Gamma_eff: tuple[float, float]
    chi_eff: tuple[complex, complex]


@dataclass(frozen=True)
class NoiseBreakdown:
    omega: float
    S_fb_1: float
    S_rp_1: float
    S_th: tuple[float, float]
    S_me: tuple[float, float]


def _require_two(p: ChainParams) -> None:
    if p.N != 2:
        raise DomainError(f"two-resonator formulas require N=2, got N={p.N}")


def thermal_force_psd(p: ChainParams, omega: float, j: int) -> float:
    """Thermal force spectrum of bath j (0-based index).

    ``markovian`` mode: flat ``(2 nbar + 1) gamma``.  ``full-coth`` mode:
    ``gamma * (omega / omega_j) * coth(x_j * omega)`` with the bath scale
    ``x_j`` fixed by the occupancy at the resonator frequency.
    """
    gam = p.gamma_j[j]
    nbar = p.nbar_j[j]
    if p.thermal_mode == "markovian":
        return (2.0 * nbar + 1.0) * gam
    wj = p.omega_j[j]
    if nbar == 0.0:
        return gam * abs(omega) / wj
    x = math.log1p(1.0 / nbar) / (2.0 * wj)
    if omega == 0.0:
        return gam / (wj * x)
    return gam * (omega / wj) / math.tanh(x * omega)


def _coeff_A(p: ChainParams, w: float) -> float:
    w1, w2 = p.omega_j
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    return w1 * w2 * (
        w**6
        - G * g * k * w**2 * w1 * wfb
        - w**2 * w1 * (G * g + w1) * wfb**2
        + k**2 * (w**2 - w1**2) * (w**2 + wfb**2)
        + w**4 * (wfb**2 - w1**2)
    )


def _coeff_B(p: ChainParams, w: float) -> float:
    w1, w2 = p.omega_j
    g1 = p.gamma_j[0]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    return w1 * w2 * (
        G * g * k * w1 * wfb**2
        + k**2 * g1 * (w**2 + wfb**2)
        + w**2 * (-G * g * w1 * wfb + g1 * (w**2 + wfb**2))
    )


def _coeff_C(p: ChainParams, w: float) -> float:
    w1 = p.omega_j[0]
    g1 = p.gamma_j[0]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    t1 = w**2 * (-k * g1 + w**2 - w1**2) - ((k + g1) * w**2 - k * w1**2) * wfb
    t2 = w * (
        g1 * w**2
        + (w**2 - w1 * (G * g + w1)) * wfb
        + k * (w**2 - w1**2 - g1 * wfb)
    )
    return t1 * t1 + t2 * t2


def _coeff_D(p: ChainParams, w: float) -> complex:
    w1 = p.omega_j[0]
    g1 = p.gamma_j[0]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    return (k - 1j * w) * (-1j * g1 * w - w**2 + w1**2) * w + (
        (k - 1j * w) * (g1 - 1j * w) * w + G * g * w * w1 + (1j * k + w) * w1**2
    ) * wfb


def _coeff_E(p: ChainParams, w: float) -> float:
    w1 = p.omega_j[0]
    G, g, k, wfb, zeta = p.G, p.g_cd, p.kappa, p.omega_fb, p.zeta
    th1 = thermal_force_psd(p, w, 0)
    return (
        4.0 * (w**2 + wfb**2) * (G**2 * k + th1 * (k**2 + w**2)) * w1**2
        + g**2 * w**2 * w1**2 * wfb**2 * (k**2 + w**2) / (k * zeta)
    )


def cooling_rate_1(p: ChainParams, w: float) -> float:
    """Frequency-resolved cooling rate of the feedback-cooled resonator."""
    w1, w2 = p.omega_j
    g2 = p.gamma_j[1]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    eta = p.eta_tilde_j[0]
    fb = G * g * wfb * w1 * (k * wfb - w**2) / ((k**2 + w**2) * (w**2 + wfb**2))
    me = 4.0 * eta**2 * w1 * w2 * g2 / (g2**2 * w**2 + (w**2 - w2**2) ** 2)
    return fb + me


def cooling_rate_2(p: ChainParams, w: float) -> float:
    """Frequency-resolved cooling rate of the second resonator."""
    eta = p.eta_tilde_j[0]
    return 4.0 * eta**2 * _coeff_B(p, w) / _coeff_C(p, w)


def _effective_squares(p: ChainParams, w: float) -> tuple[float, float]:
    """Squared effective resonance frequencies at probe frequency w.

    May be negative in a narrow band around resonance at strong loop
    gain; the susceptibilities remain well defined there.
    """
    w1, w2 = p.omega_j
    g2 = p.gamma_j[1]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    eta = p.eta_tilde_j[0]
    O1_sq = (
        w1**2
        + G * g * w**2 * wfb * w1 * (k + wfb) / ((k**2 + w**2) * (w**2 + wfb**2))
        + 4.0 * eta**2 * w1 * w2 * (w**2 - w2**2) / (g2**2 * w**2 + (w**2 - w2**2) ** 2)
    )
    O2_sq = w2**2 + 4.0 * eta**2 * _coeff_A(p, w) / _coeff_C(p, w)
    return O1_sq, O2_sq


def _chi_eff(p: ChainParams, w: float) -> tuple[complex, complex]:
    """Effective susceptibilities without the square-root extraction."""
    O1_sq, O2_sq = _effective_squares(p, w)
    Gam1 = p.gamma_j[0] + cooling_rate_1(p, w)
    Gam2 = p.gamma_j[1] + cooling_rate_2(p, w)
    w1, w2 = p.omega_j
    chi1 = w1 / (O1_sq - w**2 - 1j * w * Gam1)
    chi2 = w2 / (O2_sq - w**2 - 1j * w * Gam2)
    return chi1, chi2


def effective_response(p: ChainParams, omega: float) -> EffectiveResponse:
    """Effective resonance frequencies, dampings and susceptibilities."""
    _require_two(p)
    w = float(omega)
    w1, w2 = p.omega_j
    O1_sq, O2_sq = _effective_squares(p, w)
    if O1_sq < 0.0:
        raise DomainError(f"Omega_1_eff^2 = {O1_sq:.6g} < 0 at omega = {w:.6g}")
    if O2_sq < 0.0:
        raise DomainError(f"Omega_2_eff^2 = {O2_sq:.6g} < 0 at omega = {w:.6g}")
    O1, O2 = math.sqrt(O1_sq), math.sqrt(O2_sq)
    Gam1 = p.gamma_j[0] + cooling_rate_1(p, w)
    Gam2 = p.gamma_j[1] + cooling_rate_2(p, w)
    chi1 = w1 / (O1_sq - w**2 - 1j * w * Gam1)
    chi2 = w2 / (O2_sq - w**2 - 1j * w * Gam2)
    return EffectiveResponse(
        omega=w,
        Omega_eff=(O1, O2),
        Gamma_eff=(Gam1, Gam2),
        chi_eff=(chi1, chi2),
    )


def cooling_rates_resonant(p: ChainParams) -> tuple[float, float]:
    """Resonant (omega = 0) cooling rates in closed form."""
    _require_two(p)
    w1, w2 = p.omega_j
    g1, g2 = p.gamma_j
    eta = p.eta_tilde_j[0]
    gc1 = p.G * p.g_cd * w1 / p.kappa + 4.0 * eta**2 * w1 * g2 / w2**3
    gc2 = 4.0 * eta**2 * w2 * (p.G * p.g_cd * w1 + p.kappa * g1) / (w1**3 * p.kappa)
    return gc1, gc2


def noise_breakdown(p: ChainParams, omega: float) -> NoiseBreakdown:
    """Per-channel force noise spectra at a single frequency."""
    _require_two(p)
    if p.zeta <= 0.0:
        raise DomainError("detection efficiency zeta must be positive")
    w = float(omega)
    w2 = p.omega_j[1]
    g2 = p.gamma_j[1]
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    eta = p.eta_tilde_j[0]

    S_fb = g**2 * wfb**2 * w**2 / (4.0 * k * p.zeta * (w**2 + wfb**2))
    S_rp = G**2 * k / (k**2 + w**2)
    S_th1 = thermal_force_psd(p, w, 0)
    S_th2 = thermal_force_psd(p, w, 1)
    S_me1 = 4.0 * eta**2 * w2**2 / (g2**2 * w**2 + (w**2 - w2**2) ** 2) * S_th2
    S_me2 = eta**2 * _coeff_E(p, w) / abs(_coeff_D(p, w)) ** 2
    return NoiseBreakdown(
        omega=w,
        S_fb_1=S_fb,
        S_rp_1=S_rp,
        S_th=(S_th1, S_th2),
        S_me=(S_me1, S_me2),
    )


def position_spectrum_twomode(p: ChainParams, omega: float, j: int) -> float:
    """Position fluctuation spectrum of resonator ``j`` (0-based)."""
    _require_two(p)
    if j not in (0, 1):
        raise DomainError(f"resonator index must be 0 or 1, got {j}")
    chi = _chi_eff(p, float(omega))
    noise = noise_breakdown(p, omega)
    if j == 0:
        total = noise.S_fb_1 + noise.S_rp_1 + noise.S_th[0] + noise.S_me[0]
    else:
        total = noise.S_th[1] + noise.S_me[1]
    return abs(chi[j]) ** 2 * total


# --------------------------------------------------------------------------
# Exact phonon numbers from the characteristic coefficients.


def characteristic_coefficients(p: ChainParams) -> tuple[complex, ...]:
    """Complex coefficients a_0..a_6 of the closed-loop characteristic
    polynomial (in the probe frequency)."""
    _require_two(p)
    w1, w2 = p.omega_j
    g1, g2 = p.gamma_j
    G, g, k, wfb = p.G, p.g_cd, p.kappa, p.omega_fb
    eta = p.eta_tilde_j[0]

    a0 = 1j
    a1 = k + g1 + g2 + wfb
    a2 = -1j * (w1**2 + w2**2 + g2 * wfb + g1 * (g2 + wfb) + k * (g1 + g2 + wfb))
    a3 = (
        -w1 * wfb * (G * g + w1)
        - w2**2 * (g1 + wfb)
        - g2 * (w1**2 + g1 * wfb)
        - k * (w1**2 + w2**2 + g2 * wfb + g1 * (g2 + wfb))
    )
    a4 = 1j * (
        g1 * w2**2 * wfb
        + w1**2 * (w2**2 + g2 * wfb)
        + k * (w1**2 * wfb + w2**2 * (g1 + wfb) + g2 * (w1**2 + g1 * wfb))
        + w1 * (G * g * g2 * wfb - 4.0 * w2 * eta**2)
    )
    a5 = w1 * w2 * wfb * (G * g * w2 + w1 * w2 - 4.0 * eta**2) + k * (
        g1 * w2**2 * wfb + w1**2 * (w2**2 + g2 * wfb) - 4.0 * w1 * w2 * eta**2
    )
    a6 = -1j * k * w1 * w2 * wfb * (w1 * w2 - 4.0 * eta**2)
    return a0, a1, a2, a3, a4, a5, a6


def hurwitz_polynomial(p: ChainParams) -> np.ndarray:
    """Real descending coefficients of the characteristic polynomial in the
    drift eigenvalue variable (roots are the closed-loop poles)."""
    a0, a1, a2, a3, a4, a5, a6 = characteristic_coefficients(p)
    coeffs = np.array(
        [
            1j * a0 * (-1j) ** 6,
            1j * a1 * (-1j) ** 5,
            1j * a2 * (-1j) ** 4,
            1j * a3 * (-1j) ** 3,
            1j * a4 * (-1j) ** 2,
            1j * a5 * (-1j),
            1j * a6,
        ]
    )
    if np.abs(coeffs.imag).max() > 1e-9 * max(np.abs(coeffs).max(), 1.0):
        raise NumericalError("characteristic polynomial is not real")
    return coeffs.real


def is_stable_closed_form(p: ChainParams) -> bool:
    """Routh-Hurwitz verdict from the characteristic coefficients."""
    return routh_hurwitz_stable(hurwitz_polynomial(p))


def _b_coefficients_1(p: ChainParams) -> tuple[complex, ...]:
    w1, w2 = p.omega_j
    g1, g2 = p.gamma_j
    G, g, k, wfb, zeta = p.G, p.g_cd, p.kappa, p.omega_fb, p.zeta
    eta = p.eta_tilde_j[0]
    n1 = 1.0 + 2.0 * p.nbar_j[0]
    n2 = 1.0 + 2.0 * p.nbar_j[1]

    b0 = 0.0
    b1 = -(w1**2 / (4.0 * k * zeta)) * (g**2 * wfb**2 + 4.0 * k * g1 * zeta * n1)
    b2 = -(w1**2 / (4.0 * k * zeta)) * (
        g**2 * wfb**2 * (k**2 + g2**2 - 2.0 * w2**2)
        + 4.0 * k * (G**2 * k + g1 * n1 * (k**2 + g2**2 - 2.0 * w2**2 + wfb**2)) * zeta
    )
    b3 = -(w1**2 / (4.0 * k * zeta)) * (
        g**2 * wfb**2 * (w2**4 + k**2 * (g2**2 - 2.0 * w2**2))
        + 4.0
        * k
        * (
            G**2 * k * (g2**2 - 2.0 * w2**2 + wfb**2)
            + n1
            * g1
            * (
                k**2 * g2**2
                - 2.0 * k**2 * w2**2
                + w2**4
                + (k**2 + g2**2 - 2.0 * w2**2) * wfb**2
            )
            + 4.0 * n2 * g2 * w2**2 * eta**2
        )
        * zeta
    )
    b4 = -(w1**2 / (4.0 * zeta)) * (
        g**2 * k * w2**4 * wfb**2
        + 4.0
        * (
            G**2 * k * (w2**4 + g2**2 * wfb**2 - 2.0 * w2**2 * wfb**2)
            + n1 * g1 * (w2**4 * wfb**2 + k**2 * (w2**4 + g2**2 * wfb**2 - 2.0 * w2**2 * wfb**2))
            + 4.0 * n2 * g2 * w2**2 * (k**2 + wfb**2) * eta**2
        )
        * zeta
    )
    b5 = -k * w1**2 * w2**2 * wfb**2 * (
        (G**2 + k * g1 * n1) * w2**2 + 4.0 * k * n2 * g2 * eta**2
    )
    return b0, b1, b2, b3, b4, b5


def _b_coefficients_2(p: ChainParams) -> tuple[complex, ...]:
    w1, w2 = p.omega_j
    g1, g2 = p.gamma_j
    G, g, k, wfb, zeta = p.G, p.g_cd, p.kappa, p.omega_fb, p.zeta
    eta = p.eta_tilde_j[0]
    n1 = 1.0 + 2.0 * p.nbar_j[0]
    n2 = 1.0 + 2.0 * p.nbar_j[1]

    b0 = 0.0
    b1 = -n2 * g2 * w2**2
    b2 = -n2 * g2 * w2**2 * (k**2 + g1**2 - 2.0 * w1**2 + wfb**2)
    b3 = -(w2**2 / (k * zeta)) * (
        g**2 * w1**2 * wfb**2 * eta**2
        - 2.0 * G * g * k * n2 * g2 * w1 * wfb * (k + g1 + wfb) * zeta
        + k
        * (
            n2
            * g2
            * (
                w1**4
                + g1**2 * wfb**2
                - 2.0 * w1**2 * wfb**2
                + k**2 * (g1**2 - 2.0 * w1**2 + wfb**2)
            )
            + 4.0 * n1 * g1 * w1**2 * eta**2
        )
        * zeta
    )
    b4 = -(w2**2 / zeta) * (
        2.0 * G * g * n2 * g2 * w1 * wfb * (w1**2 * wfb + k * (w1**2 + g1 * wfb)) * zeta
        + (
            n2 * g2 * (w1**4 * wfb**2 + k**2 * (w1**4 + g1**2 * wfb**2 - 2.0 * w1**2 * wfb**2))
            + 4.0 * w1**2 * (G**2 * k + n1 * g1 * (k**2 + wfb**2)) * eta**2
        )
        * zeta
        + g**2 * w1**2 * wfb**2 * (k * eta**2 + G**2 * n2 * g2 * zeta)
    )
    b5 = -k * w1**2 * w2**2 * wfb**2 * (
        k * n2 * g2 * w1**2 + 4.0 * (G**2 + k * n1 * g1) * eta**2
    )
    return b0, b1, b2, b3, b4, b5


def _hurwitz_det(a, first_row) -> complex:
    """Determinant of the 6x6 matrix whose first row is supplied and whose
    remaining rows interleave the characteristic coefficients in the
    classical (Routh-Hurwitz) staggered layout."""
    a0, a1, a2, a3, a4, a5, a6 = a
    m = np.array(
        [
            first_row,
            [a0, a2, a4, a6, 0.0, 0.0],
            [0.0, a1, a3, a5, 0.0, 0.0],
            [0.0, a0, a2, a4, a6, 0.0],
            [0.0, 0.0, a1, a3, a5, 0.0],
            [0.0, 0.0, a0, a2, a4, a6],
        ],
        dtype=complex,
    )
    return complex(np.linalg.det(m))


def _variances(a, b, omega_l: float) -> tuple[complex, complex]:
    """Steady-state position and momentum variances of one resonator from
    the degree-6 characteristic coefficients ``a`` and the noise-numerator
    coefficients ``b`` of its position spectrum."""
    b0, b1, b2, b3, b4, b5 = b
    Delta6 = _hurwitz_det(a, [a[1], a[3], a[5], 0.0, 0.0, 0.0])
    if Delta6 == 0:
        raise StabilityError("degenerate characteristic determinant")
    q_var = -_hurwitz_det(a, [b0, b1, b2, b3, b4, b5]) / (2.0 * Delta6)
    # The momentum integrand carries an extra omega^2, which shifts the
    # numerator coefficients one slot to the left (b0 vanishes identically).
    p_var = -_hurwitz_det(a, [b1, b2, b3, b4, b5, 0.0]) / (2.0 * Delta6 * omega_l**2)
    return q_var, p_var


def exact_phonon_numbers(p: ChainParams) -> tuple[float, float]:
    """Exact steady-state phonon numbers of the two resonators.

    Only defined for the flat (markovian) bath convention; the
    coefficients below carry the ``(1 + 2 nbar)`` factors of that limit.
    """
    _require_two(p)
    if p.thermal_mode != "markovian":
        raise DomainError("exact phonon numbers require markovian thermal mode")
    if not is_stable_closed_form(p):
        raise StabilityError("parameters are unstable (Routh-Hurwitz failed)")
    # Phonon numbers are invariant under a common rescale of every rate;
    # normalizing to omega_1 = 1 keeps the degree-6 determinants well inside
    # the floating-point range for parameters given in laboratory units.
    s = p.omega_j[0]
    if s != 1.0:
        from dataclasses import replace

        p = replace(
            p,
            omega_j=tuple(w / s for w in p.omega_j),
            gamma_j=tuple(g / s for g in p.gamma_j),
            eta_tilde_j=tuple(e / s for e in p.eta_tilde_j),
            kappa=p.kappa / s,
            G=p.G / s,
            omega_fb=p.omega_fb / s,
        )
    a = characteristic_coefficients(p)
    out = []
    for l, bfun in enumerate((_b_coefficients_1, _b_coefficients_2)):
        q_var, p_var = _variances(a, bfun(p), p.omega_j[l])
        n = 0.5 * (q_var + p_var - 1.0)
        if abs(n.imag) > IM_TOL * max(abs(n.real), 1.0):
            raise NumericalError(
                f"phonon number has imaginary residue {n.imag:.3e} (n={n.real:.6g})"
            )
        out.append(n.real)
    return out[0], out[1]
