"""Entanglement swapping with two two-mode squeezed vacua and a joint measurement.

Mode layout is ``A', A, B, B'``: ``A`` and ``B`` pass through the error
channels and are measured, and ``A'``, ``B'`` are returned.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import decision
from .channels import (
    CanonicalKind,
    ChannelSpec,
    GaussianChannel,
    Primitive,
    amp_then_loss,
    apply_channel,
    build,
    to_amp_then_loss,
)
from .criteria import (
    StandardFormParams,
    duan_value,
    extract_standard_form,
    log_negativity,
    ppt_margin,
)
from .exceptions import DegenerateMarginalError, GaussepError, NotStandardFormError
from .gaussian_core import GaussianState, direct_sum, two_mode_squeezed_vacuum
from .measurements import MeasurementSpec, condition_on_measurement, cv_bell, heterodyne_pair

R_MAX = 12.0
AGREEMENT_TOL = 1e-10
NO_SWAP_TOL = 1e-9

CSV_COLUMNS = (
    "l_A", "l_B", "a_A", "a_B", "n_A_noise", "n_B_noise", "r",
    "verdict", "threshold_sum", "duan", "duan_limit", "logneg",
)


@dataclass(frozen=True)
class SwapParams:
    """Squeezing ``r`` and per-arm amplification ``a``, loss ``l`` and added noise ``n``.

    Each arm applies amplification, then loss, then noise.
    """

    r: float
    a_A: float = 1.0
    a_B: float = 1.0
    l_A: float = 0.0
    l_B: float = 0.0
    n_A_noise: float = 0.0
    n_B_noise: float = 0.0

    def __post_init__(self):
        for name in ("r", "a_A", "a_B", "l_A", "l_B", "n_A_noise", "n_B_noise"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise GaussepError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, float(val))
        if not 0 <= self.r <= R_MAX:
            raise GaussepError(f"squeezing r must lie in [0, {R_MAX}], got {self.r}")
        if self.a_A < 1 or self.a_B < 1:
            raise GaussepError("amplification parameters must be >= 1")
        if not (0 <= self.l_A <= 1 and 0 <= self.l_B <= 1):
            raise GaussepError("loss parameters must lie in [0, 1]")
        if self.n_A_noise < 0 or self.n_B_noise < 0:
            raise GaussepError("noise parameters must be >= 0")

    def spec(self, side: str) -> ChannelSpec:
        a, l, n = (self.a_A, self.l_A, self.n_A_noise) if side == "A" else (self.a_B, self.l_B, self.n_B_noise)
        steps = []
        if a != 1.0:
            steps.append(Primitive("amp", a=a))
        if l != 0.0:
            steps.append(Primitive("loss", l=l))
        if n != 0.0:
            steps.append(Primitive("noise", n=n))
        return ChannelSpec(tuple(steps))

    def folded(self, side: str) -> tuple[float, float] | None:
        """``(a', l')`` for the arm, with added noise folded in; None if entanglement breaking."""
        a, l, n = (self.a_A, self.l_A, self.n_A_noise) if side == "A" else (self.a_B, self.l_B, self.n_B_noise)
        if n == 0.0:
            return a, l
        form = to_amp_then_loss(self.spec(side))
        if form.kind is CanonicalKind.ENTANGLEMENT_BREAKING:
            return None
        return form.a, form.l


@dataclass(frozen=True)
class SwapResult:
    params: SwapParams
    cov_out: np.ndarray
    std: StandardFormParams | None
    duan: float | None
    logneg: float
    ppt_margin: float
    closed_form: StandardFormParams | None
    kappa_A: float | None
    kappa_B: float | None
    eta: float | None
    duan_limit: float | None

    def to_record(self) -> dict:
        rec = {
            "r": self.params.r,
            "a_A": self.params.a_A,
            "a_B": self.params.a_B,
            "l_A": self.params.l_A,
            "l_B": self.params.l_B,
            "n_A_noise": self.params.n_A_noise,
            "n_B_noise": self.params.n_B_noise,
        }
        for prefix, p in (("", self.std), ("closed_form_", self.closed_form)):
            rec[prefix + "n_A"] = None if p is None else p.n_A
            rec[prefix + "n_B"] = None if p is None else p.n_B
            rec[prefix + "c"] = None if p is None else p.c
        rec.update(
            duan=self.duan,
            duan_limit=self.duan_limit,
            logneg=self.logneg,
            ppt_margin=self.ppt_margin,
            kappa_A=self.kappa_A,
            kappa_B=self.kappa_B,
            eta=self.eta,
        )
        return rec


def _kappas(p: SwapParams) -> tuple[float, float, float] | None:
    fa, fb = p.folded("A"), p.folded("B")
    if fa is None or fb is None:
        return None
    (aA, lA), (aB, lB) = fa, fb
    return aA * (1 - lA), aB * (1 - lB), 1 - lA - lB


def closed_form_params(p: SwapParams) -> StandardFormParams:
    """``(n_A, n_B, c)`` of the swapped state in closed form.

    With ``kappa_i = a_i (1 - l_i)``, ``eta = 1 - l_A - l_B`` and
    ``D = kappa_A + kappa_B - 2 eta + (kappa_A + kappa_B) cosh 2r``::

        n_A = (2 kappa_A + kappa_B + 2 (kappa_A + kappa_B - 2 eta) cosh 2r + kappa_B cosh 4r) / (4 D)
        n_B = (2 kappa_B + kappa_A + 2 (kappa_A + kappa_B - 2 eta) cosh 2r + kappa_A cosh 4r) / (4 D)
        c   = 2 sqrt(kappa_A kappa_B) (cosh r sinh r)^2 / D
    """
    k = _kappas(p)
    if k is None:
        raise GaussepError("no closed form for entanglement-breaking arms")
    kA, kB, eta = k
    r = p.r
    ch2, ch4 = np.cosh(2 * r), np.cosh(4 * r)
    den = kA + kB - 2 * eta + (kA + kB) * ch2
    if not den > 0:
        raise GaussepError("closed form has a vanishing denominator (complete loss on both arms)")
    n_A = (2 * kA + kB + 2 * (kA + kB - 2 * eta) * ch2 + kB * ch4) / (4 * den)
    n_B = (2 * kB + kA + 2 * (kA + kB - 2 * eta) * ch2 + kA * ch4) / (4 * den)
    c = 2 * np.sqrt(kA * kB) * (np.cosh(r) * np.sinh(r)) ** 2 / den
    return StandardFormParams(float(n_A), float(n_B), float(c))


def large_r_duan_limit(p: SwapParams) -> float:
    """``r -> infinity`` value of the Duan function: ``-2 (1 - l_A - l_B) / sqrt(kappa_A kappa_B)``."""
    k = _kappas(p)
    if k is None:
        raise GaussepError("no Duan limit for entanglement-breaking arms")
    kA, kB, eta = k
    if kA * kB <= 0:
        raise GaussepError("Duan limit undefined when kappa_A kappa_B = 0")
    return float(-2 * eta / np.sqrt(kA * kB))


def swap_output(
    channel_A: GaussianChannel, channel_B: GaussianChannel, r: float, measurement: MeasurementSpec
) -> GaussianState:
    """State of ``A', B'`` after the channels act on ``A``, ``B`` and ``measurement`` on ``(A, B)``."""
    state = direct_sum(two_mode_squeezed_vacuum(r), two_mode_squeezed_vacuum(r))
    state = apply_channel(channel_A, state, 1)
    state = apply_channel(channel_B, state, 2)
    return condition_on_measurement(state, measurement, [1, 2])


def _arm_channel(p: SwapParams, side: str) -> GaussianChannel:
    folded = p.folded(side)
    if folded is None:
        return build(p.spec(side))
    return amp_then_loss(*folded)


def _analyse(p: SwapParams, out: GaussianState, with_closed_form: bool) -> SwapResult:
    try:
        std = extract_standard_form(out.cov)
    except NotStandardFormError:
        std = None
    duan = None
    if std is not None:
        try:
            duan = duan_value(std)
        except DegenerateMarginalError:
            duan = None
    k = _kappas(p)
    closed = None
    limit = None
    if with_closed_form and k is not None:
        closed = closed_form_params(p)
        if std is None or max(abs(std.n_A - closed.n_A), abs(std.n_B - closed.n_B), abs(std.c - closed.c)) > AGREEMENT_TOL:
            raise ArithmeticError(f"simulated swap output disagrees with the closed form for {p}")
        if k[0] * k[1] > 0:
            limit = large_r_duan_limit(p)
    return SwapResult(
        params=p,
        cov_out=out.cov,
        std=std,
        duan=duan,
        logneg=log_negativity(out.cov),
        ppt_margin=ppt_margin(out.cov),
        closed_form=closed,
        kappa_A=None if k is None else k[0],
        kappa_B=None if k is None else k[1],
        eta=None if k is None else k[2],
        duan_limit=limit,
    )


def simulate_swap(p: SwapParams) -> SwapResult:
    """Swap through a CV Bell measurement and compare with the closed form."""
    out = swap_output(_arm_channel(p, "A"), _arm_channel(p, "B"), p.r, cv_bell())
    return _analyse(p, out, with_closed_form=True)


def product_measurement_no_swap(p: SwapParams) -> SwapResult:
    """Same pipeline with heterodyne on each arm; the output must stay separable."""
    out = swap_output(_arm_channel(p, "A"), _arm_channel(p, "B"), p.r, heterodyne_pair())
    res = _analyse(p, out, with_closed_form=False)
    if res.logneg > NO_SWAP_TOL:
        raise ArithmeticError(f"separable measurement produced log-negativity {res.logneg} for {p}")
    return res


# ~~~~~~~~~~~~~~
# Threshold scans
# ~~~~~~~~~~~~~~


@dataclass(frozen=True)
class ScanRow:
    l_A: float
    l_B: float
    a_A: float
    a_B: float
    n_A_noise: float
    n_B_noise: float
    r: float
    verdict: str
    threshold_sum: float | None
    duan: float | None
    duan_limit: float | None
    logneg: float

    def to_record(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def _scan_point(point: tuple[float, ...]) -> ScanRow:
    lA, lB, aA, aB, nA, nB, r = point
    p = SwapParams(r=r, a_A=aA, a_B=aB, l_A=lA, l_B=lB, n_A_noise=nA, n_B_noise=nB)
    report = decision.all_measurements_separable(p.spec("A"), p.spec("B"))
    res = simulate_swap(p)
    return ScanRow(lA, lB, aA, aB, nA, nB, r, report.verdict, report.threshold_value, res.duan, res.duan_limit, res.logneg)


def threshold_scan(
    l_A: Iterable[float],
    l_B: Iterable[float],
    a_A: Iterable[float] = (1.0,),
    a_B: Iterable[float] = (1.0,),
    n_A_noise: Iterable[float] = (0.0,),
    n_B_noise: Iterable[float] = (0.0,),
    r: float = 4.0,
    jobs: int = 1,
) -> list[ScanRow]:
    """One row per grid point, ordered as ``itertools.product(l_A, l_B, a_A, a_B, n_A, n_B)``."""
    if not r > 0:
        raise GaussepError(f"scan squeezing must be positive, got {r}")
    points = [(*pt, float(r)) for pt in itertools.product(*(list(map(float, v)) for v in (l_A, l_B, a_A, a_B, n_A_noise, n_B_noise)))]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_scan_point, points, chunksize=max(1, len(points) // (4 * jobs))))
    return [_scan_point(pt) for pt in points]


def _fmt(val) -> str:
    if val is None or (isinstance(val, float) and math.isnan(val)):
        return ""
    if isinstance(val, float):
        return f"{val:.12g}"
    return str(val)


def rows_to_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, k)) for k in CSV_COLUMNS])
    return buf.getvalue()
