"""Parameter containers, validation, unit conversion and config parsing."""

import dataclasses
import math
from importlib import resources

import numpy as np
import pytest

from dominocool import (
    ChainParams,
    ConfigError,
    chain_from,
    load_config,
    nbar_from_temperature,
    to_dimensionless,
)
from dominocool.figures import (
    OMEGA_1_LAB,
    fig3_chain,
    fig3_physical,
    fig6_chain,
)
from dominocool.params import normalized_lab_frequencies, validate_chain

HBAR = 1.054571817e-34
KB = 1.380649e-23


def _config_path(name: str):
    return resources.files("dominocool") / "configs" / name


def test_fig3_coupling_constant():
    # Frozen value of the linearized coupling at 100 mW, kappa = 3.5 omega_1.
    p = fig3_chain()
    assert p.G == pytest.approx(0.4556522003007523, rel=1e-12)


def test_fig3_normalized_frequencies_unit():
    # The bare frequencies are back-computed so the normalized ones are 1.
    p = fig3_chain()
    assert p.omega_j == pytest.approx((1.0, 1.0), rel=1e-12)
    assert p.eta_tilde_j[0] == pytest.approx(0.05, rel=1e-12)


def test_static_shift_end_vs_interior():
    # Chain ends pick up 2 eta / m, interior resonators 2(eta + eta) / m.
    p = fig6_chain(3, 0.02)
    assert p.omega_j[0] == pytest.approx(p.omega_j[2], rel=1e-12)
    assert p.omega_j[1] > p.omega_j[0]
    phys = dataclasses.replace(
        fig3_physical(), m_j=(2.5e-10,) * 3,
        omega_tilde_j=(OMEGA_1_LAB,) * 3,
        eta_j=(0.02 * 2.5e-10 * OMEGA_1_LAB**2,) * 2,
        gamma_j=(1e-5 * OMEGA_1_LAB,) * 3, nbar_j=(1e3,) * 3,
    )
    w = normalized_lab_frequencies(phys)
    assert w[0] == pytest.approx(OMEGA_1_LAB * math.sqrt(1.0 + 2 * 0.02))
    assert w[1] == pytest.approx(OMEGA_1_LAB * math.sqrt(1.0 + 4 * 0.02))


def test_drive_amplitude_scaling():
    # G scales as sqrt(P) at fixed geometry.
    g1 = to_dimensionless(fig3_physical(P_L=0.1)).G
    g4 = to_dimensionless(fig3_physical(P_L=0.4)).G
    assert g4 == pytest.approx(2.0 * g1, rel=1e-12)


def test_packaged_configs_match_builders():
    assert chain_from(load_config(_config_path("fig3.cfg"))) == fig3_chain()
    assert chain_from(load_config(_config_path("fig6_n3.cfg"))) == fig6_chain(3, 0.02)
    assert chain_from(load_config(_config_path("fig6_n4.cfg"))) == fig6_chain(4, 0.02)


def test_dimensionless_config_loads_directly():
    p = load_config(_config_path("fig2.cfg"))
    assert isinstance(p, ChainParams)
    assert p.N == 2
    assert p.g_cd == 4.0


def test_bad_zeta_rejected():
    p = fig3_chain()
    with pytest.raises(ConfigError):
        validate_chain(dataclasses.replace(p, zeta=0.0))
    with pytest.raises(ConfigError):
        validate_chain(dataclasses.replace(p, zeta=1.2))


def test_negative_nbar_rejected():
    p = fig3_chain()
    with pytest.raises(ConfigError):
        validate_chain(dataclasses.replace(p, nbar_j=(-1.0, 1e3)))


def test_mismatched_lengths_rejected():
    p = fig3_chain()
    with pytest.raises(ConfigError):
        validate_chain(dataclasses.replace(p, gamma_j=(1e-5,)))


def test_buckling_rejected():
    # 4 eta^2 >= omega_1 omega_2 makes the static potential non-confining.
    p = fig3_chain()
    with pytest.raises(ConfigError):
        validate_chain(dataclasses.replace(p, eta_tilde_j=(0.51,)))


def test_missing_config_key(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[chain]\nomega_j = 1.0, 1.0\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_nbar_from_temperature_limits():
    w = 2.0 * math.pi * 1e7
    assert nbar_from_temperature(0.0, w) == 0.0
    # High-temperature limit: nbar -> kT / (hbar omega).
    T = 300.0
    classical = KB * T / (HBAR * w)
    assert nbar_from_temperature(T, w) == pytest.approx(classical - 0.5, rel=1e-6)


def test_chain_from_is_idempotent():
    p = fig3_chain()
    assert chain_from(p) is p or chain_from(p) == p
