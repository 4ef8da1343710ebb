"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, echoed in the terminal summary.
"""

import itertools
import time

import numpy as np

from conftest import record_criterion
from gaussep.channels import CanonicalKind, Primitive, apply_channel, spec, to_amp_then_loss
from gaussep.criteria import duan_entangled, duan_value, extract_standard_form, ppt_separable
from gaussep.decision import (
    ALL_SEPARABLE,
    KappaMu,
    all_measurements_separable,
    amp_loss_annihilates,
    amp_loss_to_kappa_mu,
    dual_povm_check,
    fz_annihilates,
)
from gaussep.gaussian_core import random_pure_state, two_mode_squeezed_vacuum
from gaussep.measurements import cv_bell
from gaussep.swapping import SwapParams, closed_form_params, product_measurement_no_swap, simulate_swap
from gaussep.verification import random_swap_params, reparameterization_suite

GRID = [k / 10 for k in range(11)]
AMPS = (1.0, 2.0, 5.0, 10.0)
DUAN_LIMIT = -1.3363062


def loss_sum(lA, lB):
    return round(lA + lB, 12)


def entangled_cells(aA, aB, r=4.0):
    return frozenset(
        (lA, lB)
        for lA, lB in itertools.product(GRID, GRID)
        if simulate_swap(SwapParams(r=r, a_A=aA, a_B=aB, l_A=lA, l_B=lB)).logneg > 1e-6
    )


def random_draws(n, seed):
    rng = np.random.default_rng(seed)
    return [random_swap_params(rng) for _ in range(n)]


def test_criterion_1_threshold_reproduction():
    start = time.perf_counter()
    bad = []
    for lA, lB in itertools.product(GRID, GRID):
        ln = simulate_swap(SwapParams(r=4, l_A=lA, l_B=lB)).logneg
        s = loss_sum(lA, lB)
        if (ln > 1e-6) != (s <= 0.99) or (s >= 1 and ln > 1e-8):
            bad.append((lA, lB, ln))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record_criterion(1, ok, f"121 cells, {len(bad)} wrong, {elapsed:.2f} s")
    assert ok, bad


def test_criterion_2_amplification_irrelevance():
    partitions = {(aA, aB): entangled_cells(aA, aB) for aA in AMPS for aB in AMPS}
    distinct = set(partitions.values())
    ok = len(distinct) == 1
    record_criterion(2, ok, f"{len(partitions)} amplification pairs, {len(distinct)} distinct partition(s)")
    assert ok


def test_criterion_3_closed_form_agreement():
    worst = 0.0
    for p in random_draws(200, seed=2024):
        res = simulate_swap(p)
        cf = closed_form_params(p)
        sim = extract_standard_form(res.cov_out)
        worst = max(worst, abs(sim.n_A - cf.n_A), abs(sim.n_B - cf.n_B), abs(sim.c - cf.c))
    ok = worst <= 1e-10
    record_criterion(3, ok, f"200 draws, worst |delta| = {worst:.2e}")
    assert ok


def test_criterion_4_large_r_limit():
    values = [simulate_swap(SwapParams(r=r, l_A=0.2, l_B=0.3)).duan for r in (2, 3, 4, 5)]
    gaps = [abs(v - DUAN_LIMIT) for v in values]
    rel = gaps[-1] / abs(DUAN_LIMIT)
    converging = all(b < a for a, b in zip(gaps, gaps[1:]))
    monotone = all(b < a for a, b in zip(values, values[1:])) or all(b > a for a, b in zip(values, values[1:]))
    ok = rel <= 0.02 and converging and monotone
    record_criterion(4, ok, f"duan(r=5) = {values[-1]:.7f}, relative gap {rel:.2e}")
    assert ok, values


def _short_circuits(channel_spec) -> bool:
    eb = to_amp_then_loss(channel_spec).kind is CanonicalKind.ENTANGLEMENT_BREAKING
    report = all_measurements_separable(channel_spec, spec())
    return eb and report.all_separable and report.threshold_value is None


def test_criterion_5_reparameterization():
    res = reparameterization_suite(n=20)
    eb_loss = all(
        _short_circuits(spec(Primitive("loss", l=l), Primitive("noise", n=n))) == (l + n >= 1 - 1e-12)
        for l, n in itertools.product(np.linspace(0, 1, 20), np.linspace(0, 1.2, 20))
    )
    eb_noise = all(_short_circuits(spec(Primitive("noise", n=n))) == (n >= 1 - 1e-12) for n in np.linspace(0, 2, 41))
    ok = res.ok and eb_loss and eb_noise
    record_criterion(5, ok, f"{res.passed} round trips ok, {res.failed} failed; short-circuits ok: {eb_loss and eb_noise}")
    assert ok, res.failures


def test_criterion_6_annihilation_equivalence():
    amps = (1.0, 1.25, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0)
    losses = np.linspace(0.0, 0.9, 10)
    total = disagree = boundary = 0
    for aA, lA, aB, lB in itertools.product(amps, losses, amps, losses):
        total += 1
        if abs(1 / aA + 1 / aB - 1) <= 1e-12:
            boundary += 1
        fz = fz_annihilates(amp_loss_to_kappa_mu(aA, lA), amp_loss_to_kappa_mu(aB, lB))
        disagree += fz != amp_loss_annihilates(aA, aB)
    ok = total == 10_000 and disagree == 0 and boundary > 0
    record_criterion(6, ok, f"{total} points ({boundary} on the boundary), {disagree} disagreements")
    assert ok


def test_criterion_7_dual_route():
    checked = bad = 0
    for lA, lB in itertools.product(GRID, GRID):
        if abs(lA + lB - 1) <= 0.01:
            continue
        checked += 1
        sa, sb = spec(Primitive("loss", l=lA)), spec(Primitive("loss", l=lB))
        verdict = all_measurements_separable(sa, sb).verdict == ALL_SEPARABLE
        bad += dual_povm_check(cv_bell(), sa, sb, r_reg=5.0).separable != verdict
    ok = bad == 0
    record_criterion(7, ok, f"{checked} non-boundary cells, {bad} disagreements")
    assert ok


def test_criterion_8_no_swap():
    worst = max(product_measurement_no_swap(p).logneg for p in random_draws(100, seed=99))
    ok = worst <= 1e-9
    record_criterion(8, ok, f"100 draws, max log-negativity {worst:.2e}")
    assert ok


ANNIHILATING = [
    (KappaMu(1.0, 0.5), KappaMu(1.0, 0.5)),
    (amp_loss_to_kappa_mu(3.0, 0.2), amp_loss_to_kappa_mu(2.0, 0.4)),
    (KappaMu(0.5, 0.5), KappaMu(2.0, 1.0)),
]
NON_ANNIHILATING = [
    (KappaMu(1.0, 0.0), KappaMu(1.0, 0.0)),
    (amp_loss_to_kappa_mu(1.0, 0.3), amp_loss_to_kappa_mu(1.0, 0.3)),
    (amp_loss_to_kappa_mu(1.5, 0.1), amp_loss_to_kappa_mu(2.0, 0.0)),
]


def _apply_pair(A: KappaMu, B: KappaMu, seed: int):
    state = random_pure_state(2, seed=seed, z_max=2.0)
    state = apply_channel(A.channel(), state, 0)
    return apply_channel(B.channel(), state, 1)


def test_criterion_9_annihilation_sampling():
    for A, B in ANNIHILATING:
        assert fz_annihilates(A, B)
    for A, B in NON_ANNIHILATING:
        assert not fz_annihilates(A, B)
    sep_fail = sum(
        not ppt_separable(_apply_pair(A, B, 10_000 * k + i).cov)
        for k, (A, B) in enumerate(ANNIHILATING)
        for i in range(1000)
    )
    witnessed = [
        any(not ppt_separable(_apply_pair(A, B, 50_000 + 10_000 * k + i).cov) for i in range(1000))
        for k, (A, B) in enumerate(NON_ANNIHILATING)
    ]
    ok = sep_fail == 0 and all(witnessed)
    record_criterion(9, ok, f"3000 annihilating samples, {sep_fail} entangled; non-annihilating witnessed {sum(witnessed)}/3")
    assert ok


def test_criterion_10_duan_ppt_cross_check():
    outputs = [simulate_swap(p) for p in random_draws(200, seed=7)]
    outputs += [
        simulate_swap(SwapParams(r=4, a_A=aA, a_B=aB, l_A=lA, l_B=lB))
        for aA, aB in itertools.product(AMPS, AMPS)
        for lA, lB in itertools.product(GRID, GRID)
    ]
    with_duan = [res for res in outputs if res.duan is not None]
    disagree = sum(duan_entangled(res.std) != (not ppt_separable(res.cov_out)) for res in with_duan)
    tmsv = duan_value(extract_standard_form(two_mode_squeezed_vacuum(1.0).cov))
    ok = disagree == 0 and abs(tmsv - (-1.7293294)) <= 1e-6
    record_criterion(10, ok, f"{len(with_duan)} outputs, {disagree} disagreements; TMSV(1) duan {tmsv:.7f}")
    assert ok
