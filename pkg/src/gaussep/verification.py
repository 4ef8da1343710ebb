"""Invariant suites run by ``gaussep verify``.

Each suite returns a :class:`SuiteResult` with pass/fail counts; none of them
raise on a failed check.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import CanonicalKind, Primitive, amp_then_loss, build, spec, to_amp_then_loss
from .decision import (
    amp_loss_annihilates,
    amp_loss_to_kappa_mu,
    decision_consistency,
    fz_annihilates,
)
from .swapping import SwapParams, product_measurement_no_swap, simulate_swap

ROUND_TRIP_TOL = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def check(self, ok: bool, label: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < 10:
                self.failures.append(label)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_record(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "failed": self.failed, "failures": self.failures}


def _round_trip_error(channel_spec) -> tuple[CanonicalKind, float]:
    form = to_amp_then_loss(channel_spec)
    if form.kind is not CanonicalKind.AMP_THEN_LOSS:
        return form.kind, 0.0
    target = build(channel_spec)
    canon = amp_then_loss(form.a, form.l)
    err = max(np.linalg.norm(target.X - canon.X), np.linalg.norm(target.Y - canon.Y))
    return form.kind, float(err)


def reparameterization_suite(n: int = 20) -> SuiteResult:
    """Loss-then-noise, noise, and amplification-then-noise round trips."""
    res = SuiteResult("reparameterization")
    ls = np.linspace(0.0, 0.95, n)
    ns = np.linspace(0.0, 1.2, n)
    amps = np.linspace(1.0, 10.0, n)
    for l, nn in itertools.product(ls, ns):
        kind, err = _round_trip_error(spec(Primitive("loss", l=l), Primitive("noise", n=nn)))
        eb = l + nn >= 1 - 1e-12
        res.check((kind is CanonicalKind.ENTANGLEMENT_BREAKING) == eb and err <= ROUND_TRIP_TOL, f"loss {l:.4g} noise {nn:.4g}")
    half = np.linspace(0.0, 0.6, n)
    for n1, n2 in itertools.product(half, half):
        kind, err = _round_trip_error(spec(Primitive("noise", n=n1), Primitive("noise", n=n2)))
        eb = n1 + n2 >= 1 - 1e-12
        res.check((kind is CanonicalKind.ENTANGLEMENT_BREAKING) == eb and err <= ROUND_TRIP_TOL, f"noise {n1:.4g}+{n2:.4g}")
    for a, nn in itertools.product(amps, ns):
        kind, err = _round_trip_error(spec(Primitive("amp", a=a), Primitive("noise", n=nn)))
        eb = nn >= 1 - 1e-12
        res.check((kind is CanonicalKind.ENTANGLEMENT_BREAKING) == eb and err <= ROUND_TRIP_TOL, f"amp {a:.4g} noise {nn:.4g}")
    return res


ANNIHILATION_AMPS = (1.0, 1.25, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0)
ANNIHILATION_LOSSES = tuple(np.linspace(0.0, 0.9, 10))


def annihilation_equivalence_suite() -> SuiteResult:
    """Kappa-mu annihilation inequality against ``1/a_A + 1/a_B <= 1`` on a 10^4 grid."""
    res = SuiteResult("annihilation_equivalence")
    for aA, lA, aB, lB in itertools.product(ANNIHILATION_AMPS, ANNIHILATION_LOSSES, ANNIHILATION_AMPS, ANNIHILATION_LOSSES):
        fz = fz_annihilates(amp_loss_to_kappa_mu(aA, lA), amp_loss_to_kappa_mu(aB, lB))
        res.check(fz == amp_loss_annihilates(aA, aB), f"a=({aA:.4g},{aB:.4g}) l=({lA:.3g},{lB:.3g})")
    return res


def random_swap_params(rng: np.random.Generator) -> SwapParams:
    return SwapParams(
        r=rng.uniform(0.1, 6.0),
        a_A=rng.uniform(1.0, 10.0),
        a_B=rng.uniform(1.0, 10.0),
        l_A=rng.uniform(0.0, 0.95),
        l_B=rng.uniform(0.0, 0.95),
    )


def _closed_form_point(p: SwapParams) -> bool:
    try:
        simulate_swap(p)
    except ArithmeticError:
        return False
    return True


def _no_swap_point(p: SwapParams) -> bool:
    try:
        product_measurement_no_swap(p)
    except ArithmeticError:
        return False
    return True


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def closed_form_suite(samples: int = 200, seed: int = 0, jobs: int = 1) -> SuiteResult:
    res = SuiteResult("closed_form_agreement")
    rng = np.random.default_rng(seed)
    params = [random_swap_params(rng) for _ in range(samples)]
    for p, ok in zip(params, _map(_closed_form_point, params, jobs)):
        res.check(ok, str(p))
    return res


def no_swap_suite(samples: int = 100, seed: int = 1, jobs: int = 1) -> SuiteResult:
    res = SuiteResult("product_measurement_no_swap")
    rng = np.random.default_rng(seed)
    params = [random_swap_params(rng) for _ in range(samples)]
    for p, ok in zip(params, _map(_no_swap_point, params, jobs)):
        res.check(ok, str(p))
    return res


def _consistency_point(pt: tuple[float, float, float]) -> bool:
    import warnings

    lA, lB, r = pt
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = decision_consistency(spec(Primitive("loss", l=lA)), spec(Primitive("loss", l=lB)), r=r)
    return rep.agree


def consistency_suite(r: float = 5.0, jobs: int = 1) -> SuiteResult:
    """Decision vs. CV Bell swap vs. dual route on an 11x11 loss grid."""
    res = SuiteResult("decision_consistency")
    grid = [k / 10 for k in range(11)]
    points = [(lA, lB, r) for lA in grid for lB in grid]
    for pt, ok in zip(points, _map(_consistency_point, points, jobs)):
        res.check(ok, f"loss ({pt[0]}, {pt[1]})")
    return res


def run_all(seed: int = 0, samples: int = 200, jobs: int = 1, inject_fault: bool = False) -> list[SuiteResult]:
    results = [
        reparameterization_suite(),
        annihilation_equivalence_suite(),
        closed_form_suite(samples, seed, jobs),
        consistency_suite(jobs=jobs),
        no_swap_suite(samples, seed + 1, jobs),
    ]
    if inject_fault:
        results.append(SuiteResult("injected_fault", failed=1, failures=["fault injected on request"]))
    return results


__all__ = [
    "SuiteResult",
    "annihilation_equivalence_suite",
    "closed_form_suite",
    "consistency_suite",
    "no_swap_suite",
    "reparameterization_suite",
    "run_all",
]
