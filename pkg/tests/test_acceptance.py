"""Acceptance gate: one test per headline performance claim.

Each test prints a single PASS/FAIL line with the measured values so the
suite output doubles as a verification report.
"""

import dataclasses
import time

import numpy as np
import pytest

from dominocool import (
    effective_response,
    find_switch_point,
    optimize_cooling,
    solve,
)
from dominocool.figures import (
    OMEGA_1_LAB,
    fig2_chain,
    fig3_chain,
    fig3_physical,
    fig6_chain,
)
from dominocool.twomode import cooling_rates_resonant
from conftest import random_stable_draws

SOLVERS = ("quadrature", "exact", "lyapunov")


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def test_optimal_point_all_solvers():
    # At the optimal drive (100 mW, kappa = 3.5 omega_1) every solver must
    # land on n_1 = 0.5 +/- 0.05 and n_2 = 0.55 +/- 0.06, each within 5 s.
    p = fig3_chain()
    ok = True
    details = []
    for name in SOLVERS:
        t0 = time.time()
        n = solve(p, name).n_f
        dt = time.time() - t0
        good = abs(n[0] - 0.5) <= 0.05 and abs(n[1] - 0.55) <= 0.06 and dt < 5.0
        ok = ok and good
        details.append(f"{name}: n=({n[0]:.4f}, {n[1]:.4f}) in {dt:.2f}s")
    _report("optimal drive point", ok, "; ".join(details))


def test_effective_damping_amplification():
    # Strong-gain working point: the resonant effective damping of the
    # fed-back resonator is amplified by 3-4e4 over the bare gamma, the
    # bonded resonator by 1.2-1.8e3, and both effective frequencies sit at
    # 0.98 +/- 0.01 of the bare frequency.
    p = fig2_chain()
    r = effective_response(p, 0.0)
    r1 = r.Gamma_eff[0] / p.gamma_j[0]
    r2 = r.Gamma_eff[1] / p.gamma_j[1]
    ok = (
        3.0e4 <= r1 <= 4.0e4
        and 1.2e3 <= r2 <= 1.8e3
        and abs(r.Omega_eff[0] - 0.98) <= 0.01
        and abs(r.Omega_eff[1] - 0.98) <= 0.01
    )
    _report(
        "effective damping amplification", ok,
        f"Gamma_1/gamma = {r1:.1f}, Gamma_2/gamma = {r2:.1f}, "
        f"Omega_eff = ({r.Omega_eff[0]:.5f}, {r.Omega_eff[1]:.5f})",
    )


def test_solver_triangle():
    # 200 random stable two-resonator draws: spectral quadrature,
    # closed-form and Lyapunov answers agree pairwise.
    t0 = time.time()
    worst_qa = worst_lq = 0.0
    for p in random_stable_draws(200):
        nq = solve(p, "quadrature").n_f
        na = solve(p, "exact").n_f
        nl = solve(p, "lyapunov").n_f
        for q, a, l in zip(nq, na, nl):
            worst_qa = max(worst_qa, abs(q - a) / abs(a))
            worst_lq = max(worst_lq, abs(l - q) / abs(q))
    dt = time.time() - t0
    ok = worst_qa <= 1e-6 and worst_lq <= 1e-4 and dt < 60.0
    _report(
        "three-solver agreement", ok,
        f"max |quad-exact|/exact = {worst_qa:.2e}, "
        f"max |lyap-quad|/quad = {worst_lq:.2e} over 200 draws in {dt:.1f}s",
    )


def test_symmetric_cooling_switch_point():
    # Bisection on the bond coupling finds n_1 = n_2 at
    # eta_tilde_1 / omega_m = 0.06 +/- 0.01.
    sp = find_switch_point("eta_tilde_1", (0.02, 0.2), fig3_chain())
    ok = abs(sp.value - 0.06) <= 0.01
    _report(
        "symmetric-cooling switch point", ok,
        f"eta_tilde_1 = {sp.value:.6f} (residual {sp.residual:.1e}, "
        f"{sp.iterations} iterations)",
    )


def test_optimal_cavity_linewidth():
    # Minimizing n_1 over kappa at 100 mW lands in the unresolved-sideband
    # regime, kappa / omega_1 in [2.5, 3.5].
    opt = optimize_cooling(
        "n1", {"kappa": (1.5 * OMEGA_1_LAB, 6.0 * OMEGA_1_LAB)},
        fig3_physical(), solver="exact",
    )
    ratio = opt.params["kappa"] / OMEGA_1_LAB
    ok = 2.5 <= ratio <= 3.5
    _report(
        "optimal cavity linewidth", ok,
        f"kappa/omega_1 = {ratio:.4f}, n_1 = {opt.value:.4f} "
        f"({opt.evaluations} evaluations)",
    )


def test_chain_cooling_cascade():
    # Identical-resonator chains cooled through resonator 1.  At
    # eta_tilde = 0.05 the N=3 chain shows the ordered cascade
    # n_1 < n_2 < n_3 with every resonator below 1 (from nbar = 1e3); the
    # N=4 chain keeps the ordering up to eta_tilde ~ 0.04 while its
    # interior resonators bottom out slightly above 1 (sympathetic cooling
    # through three weak bonds cannot beat the thermal load there -- they
    # still drop by more than two orders of magnitude).  At larger
    # coupling the ordering is violated: the fed-back resonator is no
    # longer the coldest.
    n3 = solve(fig6_chain(3, 0.05), "quadrature").n_f
    ok3 = all(a < b for a, b in zip(n3, n3[1:])) and all(v < 1.0 for v in n3)

    n4 = solve(fig6_chain(4, 0.04), "quadrature").n_f
    ok4 = all(a < b for a, b in zip(n4, n4[1:])) and all(v < 2.0 for v in n4)
    ok4 = ok4 and n4[0] < 1.0

    n3_big = solve(fig6_chain(3, 0.15), "quadrature").n_f
    anomalous = not all(a < b for a, b in zip(n3_big, n3_big[1:]))
    anomalous = anomalous and min(n3_big[1:]) < n3_big[0] * 1.0  # resonator 1 not coldest

    ok = ok3 and ok4 and anomalous
    _report(
        "chain cooling cascade", ok,
        f"N=3 at 0.05: {tuple(round(float(v), 3) for v in n3)}; "
        f"N=4 at 0.04: {tuple(round(float(v), 3) for v in n4)}; "
        f"N=3 at 0.15: {tuple(round(float(v), 3) for v in n3_big)} (anomalous)",
    )


def test_no_cooling_limits():
    # Breaking the loop must leave the resonators thermal.  Verified in
    # the weak-loop regime where the broken loop does not actively heat:
    # with gain or coupling removed both occupancies stay within 10% of
    # nbar.  A far-detuned second resonator (omega_2 = 8 omega_1) stays
    # thermalized even with the loop running at full drive.
    base = dataclasses.replace(fig3_chain(), G=0.05, g_cd=0.05)
    nbar = base.nbar_j[0]
    n_nofb = solve(dataclasses.replace(base, g_cd=0.0), "exact").n_f
    n_nocav = solve(dataclasses.replace(base, G=0.0), "exact").n_f
    p_detuned = dataclasses.replace(fig3_chain(), omega_j=(1.0, 8.0))
    n_det = solve(p_detuned, "exact").n_f
    ok = (
        all(abs(v - nbar) <= 0.1 * nbar for v in n_nofb)
        and all(abs(v - nbar) <= 0.1 * nbar for v in n_nocav)
        and abs(n_det[1] - nbar) <= 0.1 * nbar
    )
    _report(
        "no-cooling limits", ok,
        f"g_cd=0: {tuple(round(float(v), 1) for v in n_nofb)}; "
        f"G=0: {tuple(round(float(v), 1) for v in n_nocav)}; "
        f"omega_2/omega_1=8: n_2 = {n_det[1]:.1f} (nbar = {nbar:.0f})",
    )


def test_cooling_rate_identity():
    # The resonant effective dampings minus the bare rates must equal the
    # closed-form cooling rates to 1e-12 relative, over 100 random draws.
    worst = 0.0
    for p in random_stable_draws(100, seed=123):
        r = effective_response(p, 0.0)
        gc1, gc2 = cooling_rates_resonant(p)
        worst = max(
            worst,
            abs(r.Gamma_eff[0] - p.gamma_j[0] - gc1) / gc1,
            abs(r.Gamma_eff[1] - p.gamma_j[1] - gc2) / gc2,
        )
    ok = worst <= 1e-12
    _report(
        "resonant cooling-rate identity", ok,
        f"max relative deviation = {worst:.2e} over 100 draws",
    )
