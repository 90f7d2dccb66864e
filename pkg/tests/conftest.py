"""Shared fixtures and parameter-draw helpers for the test suite."""

import numpy as np
import pytest

from dominocool import ChainParams, stability_check
from dominocool.figures import fig2_chain, fig3_chain


def random_stable_draws(count: int, seed: int = 42) -> list[ChainParams]:
    """Deterministic stream of stable two-resonator parameter sets.

    Draws cover the unresolved-sideband working regime of the device:
    near-degenerate resonators, weak mechanical bonds, moderate
    optomechanical and feedback gains.  Unstable or buckled draws are
    discarded and redrawn so the returned list always holds ``count``
    stable sets.
    """
    rng = np.random.default_rng(seed)
    draws: list[ChainParams] = []
    while len(draws) < count:
        p = ChainParams(
            omega_j=(1.0, float(rng.uniform(0.7, 1.4))),
            gamma_j=(
                float(10.0 ** rng.uniform(-6.0, -4.0)),
                float(10.0 ** rng.uniform(-6.0, -4.0)),
            ),
            eta_tilde_j=(float(rng.uniform(0.01, 0.2)),),
            kappa=float(rng.uniform(1.0, 6.0)),
            G=float(rng.uniform(0.05, 0.6)),
            g_cd=float(rng.uniform(0.1, 2.0)),
            omega_fb=float(rng.uniform(1.0, 5.0)),
            zeta=float(rng.uniform(0.5, 1.0)),
            nbar_j=(
                float(10.0 ** rng.uniform(1.0, 3.5)),
                float(10.0 ** rng.uniform(1.0, 3.5)),
            ),
        )
        if 4.0 * p.eta_tilde_j[0] ** 2 >= p.omega_j[0] * p.omega_j[1]:
            continue
        if stability_check(p).stable:
            draws.append(p)
    return draws


@pytest.fixture(scope="session")
def fig3_params() -> ChainParams:
    return fig3_chain()


@pytest.fixture(scope="session")
def fig2_params() -> ChainParams:
    return fig2_chain()
