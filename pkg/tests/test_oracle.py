"""State-space oracle: drift/diffusion assembly and Lyapunov covariance."""

import dataclasses

import numpy as np
import pytest

from dominocool import ChainParams, StabilityError, UnsupportedMode
from dominocool.oracle import build, phonon_numbers, steady_covariance
from conftest import random_stable_draws


def _single(G=0.0, g_cd=0.0, nbar=25.0) -> ChainParams:
    return ChainParams(
        omega_j=(1.0,),
        gamma_j=(1e-4,),
        eta_tilde_j=(),
        kappa=3.5,
        G=G,
        g_cd=g_cd,
        omega_fb=3.0,
        zeta=0.8,
        nbar_j=(nbar,),
    )


def test_dimensions():
    m = build(_single())
    assert m.drift.shape == (5, 5)  # 2 cavity + 2 mechanical + 1 filter
    assert m.diffusion.shape == (5, 5)
    assert np.allclose(m.diffusion, m.diffusion.T)


def test_diffusion_positive_semidefinite():
    for p in random_stable_draws(20, seed=3):
        m = build(p)
        assert np.linalg.eigvalsh(m.diffusion).min() >= -1e-12


def test_gcd_zero_filter_decouples():
    # With the gain off, the filter state must not act back on the
    # mechanics: the columns of the drift matrix that feed the momentum
    # rows from the filter state vanish.
    p = _single(G=0.3, g_cd=0.0)
    m = build(p)
    z = m.dim - 1
    mech_rows = range(2, 2 + 2 * p.N)
    assert all(m.drift[r, z] == 0.0 for r in mech_rows)


def test_thermal_equilibrium_without_drive():
    # N=1, G=0: the mechanical covariance is the thermal state.
    nbar = 25.0
    n = phonon_numbers(_single(nbar=nbar))
    assert n[0] == pytest.approx(nbar, rel=1e-10)


def test_scalar_lyapunov():
    # x' = -gamma x + noise of strength 2 gamma sigma^2 gives V = sigma^2.
    from scipy.linalg import solve_continuous_lyapunov

    gamma, sigma2 = 0.37, 2.4
    V = solve_continuous_lyapunov(np.array([[-gamma]]),
                                  -np.array([[2 * gamma * sigma2]]))
    assert V[0, 0] == pytest.approx(sigma2, rel=1e-12)


def test_lyapunov_residual_and_psd():
    for p in random_stable_draws(25, seed=5):
        m = build(p)
        V = steady_covariance(m)
        res = m.drift @ V + V @ m.drift.T + m.diffusion
        assert np.linalg.norm(res) <= 1e-10 * max(1.0, np.linalg.norm(m.diffusion))
        assert np.linalg.eigvalsh(V).min() >= -1e-10


def test_unstable_raises(fig3_params):
    # Overdriven loop gain pushes the closed loop across the stability
    # border; the Lyapunov solve must refuse rather than return garbage.
    p = dataclasses.replace(fig3_params, g_cd=500.0)
    m = build(p)
    assert np.linalg.eigvals(m.drift).real.max() > 0
    with pytest.raises(StabilityError):
        steady_covariance(m)


def test_full_coth_rejected():
    p = dataclasses.replace(_single(), thermal_mode="full-coth")
    with pytest.raises(UnsupportedMode):
        build(p)


def test_matches_quadrature(fig3_params):
    from dominocool import solve

    nl = solve(fig3_params, "lyapunov").n_f
    nq = solve(fig3_params, "quadrature").n_f
    for a, b in zip(nl, nq):
        assert a == pytest.approx(b, rel=1e-4)


def test_three_resonator_lyapunov():
    from dominocool import solve
    from dominocool.figures import fig6_chain

    p = fig6_chain(3, 0.05)
    nl = solve(p, "lyapunov").n_f
    nq = solve(p, "quadrature").n_f
    for a, b in zip(nl, nq):
        assert a == pytest.approx(b, rel=1e-4)
