"""Two-resonator closed forms: effective response, noise terms, exact solver."""

import dataclasses
import math

import numpy as np
import pytest

from dominocool import (
    DomainError,
    effective_response,
    exact_phonon_numbers,
    noise_breakdown,
    position_spectrum_twomode,
    solve,
    spectrum,
)
from dominocool.twomode import (
    characteristic_coefficients,
    cooling_rate_1,
    cooling_rate_2,
    cooling_rates_resonant,
    hurwitz_polynomial,
    is_stable_closed_form,
    thermal_force_psd,
)
from conftest import random_stable_draws


def test_requires_two_resonators():
    from dominocool.figures import fig6_chain

    with pytest.raises(DomainError):
        effective_response(fig6_chain(3, 0.02), 0.0)


def test_thermal_force_psd_markovian(fig3_params):
    p = fig3_params
    flat = (2.0 * p.nbar_j[0] + 1.0) * p.gamma_j[0]
    assert thermal_force_psd(p, 0.0, 0) == flat
    assert thermal_force_psd(p, 5.0, 0) == flat


def test_thermal_force_psd_full_coth(fig3_params):
    # The coth convention is fixed to agree with the flat value at the
    # resonator frequency and falls to the quantum floor at large omega.
    p = dataclasses.replace(fig3_params, thermal_mode="full-coth")
    flat = (2.0 * p.nbar_j[0] + 1.0) * p.gamma_j[0]
    at_resonance = thermal_force_psd(p, p.omega_j[0], 0)
    assert at_resonance == pytest.approx(flat, rel=1e-12)
    w_hi = 1e5
    assert thermal_force_psd(p, w_hi, 0) == pytest.approx(
        p.gamma_j[0] * w_hi / p.omega_j[0], rel=1e-6
    )


def test_resonant_rates_match_frequency_resolved(fig3_params):
    # The omega -> 0 limit of the frequency-resolved rates must equal the
    # closed-form resonant rates.
    gc1, gc2 = cooling_rates_resonant(fig3_params)
    assert cooling_rate_1(fig3_params, 0.0) == pytest.approx(gc1, rel=1e-12)
    assert cooling_rate_2(fig3_params, 0.0) == pytest.approx(gc2, rel=1e-12)


def test_effective_response_no_feedback(fig3_params):
    # With the loop and the bond off, the effective quantities reduce to
    # the bare resonator values.
    p = dataclasses.replace(
        fig3_params, G=0.0, g_cd=0.0, eta_tilde_j=(0.0,)
    )
    r = effective_response(p, 0.0)
    assert r.Omega_eff[0] == pytest.approx(p.omega_j[0], rel=1e-12)
    assert r.Gamma_eff[0] == pytest.approx(p.gamma_j[0], rel=1e-12)


def test_effective_damping_positive_on_loop(fig3_params):
    r = effective_response(fig3_params, 0.0)
    assert r.Gamma_eff[0] > fig3_params.gamma_j[0]
    assert r.Gamma_eff[1] > fig3_params.gamma_j[1]


def test_monotone_gain_property(fig2_params):
    # Increasing the feedback gain from 0 to 4 monotonically increases the
    # resonant effective damping of the fed-back resonator.
    gains = np.linspace(0.0, 4.0, 20)
    rates = [
        effective_response(
            dataclasses.replace(fig2_params, g_cd=float(g)), 0.0
        ).Gamma_eff[0]
        for g in gains
    ]
    assert all(b > a for a, b in zip(rates, rates[1:]))


def test_noise_breakdown_composes_spectrum(fig3_params):
    # S_q1 = |chi_1,eff|^2 (S_fb + S_rp + S_th,1 + S_me,1) and similarly
    # for resonator 2 with only thermal and bond terms.
    for w in (0.5, 0.95, 1.05, 2.0):
        r = effective_response(fig3_params, w)
        nb = noise_breakdown(fig3_params, w)
        s1 = abs(r.chi_eff[0]) ** 2 * (
            nb.S_fb_1 + nb.S_rp_1 + nb.S_th[0] + nb.S_me[0]
        )
        s2 = abs(r.chi_eff[1]) ** 2 * (nb.S_th[1] + nb.S_me[1])
        assert position_spectrum_twomode(fig3_params, w, 0) == pytest.approx(
            s1, rel=1e-12
        )
        assert position_spectrum_twomode(fig3_params, w, 1) == pytest.approx(
            s2, rel=1e-12
        )


def test_twomode_spectrum_matches_general_chain(fig3_params):
    for w in (0.3, 0.9, 1.0, 1.1, 3.0):
        for j in (0, 1):
            assert position_spectrum_twomode(
                fig3_params, w, j
            ) == pytest.approx(spectrum(fig3_params, w, j), rel=1e-10)


def test_spectrum_peaks_near_effective_resonance(fig3_params):
    # The noise spectra peak close to the (strongly broadened) mechanical
    # resonance at omega ~ omega_m.
    grid = np.linspace(0.5, 1.5, 2001)
    for j in (0, 1):
        vals = [position_spectrum_twomode(fig3_params, w, j) for w in grid]
        w_peak = grid[int(np.argmax(vals))]
        assert 0.85 < w_peak < 1.15


def test_characteristic_polynomial_roots_match_drift():
    # The degree-6 characteristic coefficients must reproduce the coupled
    # eigenvalues of the drift matrix (excluding the decoupled amplitude
    # quadrature pole at -kappa).
    from dominocool import chain
    from dominocool.oracle import build

    for p in random_stable_draws(25, seed=7):
        a = characteristic_coefficients(p)
        poly = np.array(a, dtype=complex)
        roots = np.roots(poly)
        eigs = np.linalg.eigvals(build(p).drift)
        # the complex-coefficient polynomial lives on one frequency branch;
        # its roots map onto drift eigenvalues via s = -conj(-i omega)
        mapped = -np.conj(-1j * roots)
        for r in mapped:
            dist = np.min(np.abs(eigs - r))
            assert dist < 1e-8 * max(1.0, abs(r))


def test_closed_form_stability_agrees_with_eigenvalues():
    from dominocool import stability_check

    for p in random_stable_draws(50, seed=11):
        assert is_stable_closed_form(p) == stability_check(p).stable


def test_hurwitz_polynomial_is_real(fig3_params):
    coeffs = hurwitz_polynomial(fig3_params)
    assert np.all(np.isreal(coeffs))


def test_exact_phonon_numbers_scale_invariant(fig3_params):
    # Phonon numbers are invariant under a common rescaling of all rates.
    p = fig3_params
    s = 7.3
    scaled = dataclasses.replace(
        p,
        omega_j=tuple(w * s for w in p.omega_j),
        gamma_j=tuple(g * s for g in p.gamma_j),
        eta_tilde_j=tuple(e * s for e in p.eta_tilde_j),
        kappa=p.kappa * s,
        G=p.G * s,
        omega_fb=p.omega_fb * s,
    )
    n0 = exact_phonon_numbers(p)
    n1 = exact_phonon_numbers(scaled)
    assert n1[0] == pytest.approx(n0[0], rel=1e-10)
    assert n1[1] == pytest.approx(n0[1], rel=1e-10)


def test_exact_solver_on_reference_point(fig3_params):
    n = exact_phonon_numbers(fig3_params)
    assert n[0] == pytest.approx(0.4941238055639, rel=1e-10)
    assert n[1] == pytest.approx(0.5344070523265, rel=1e-10)
