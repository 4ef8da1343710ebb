"""Decide whether a pair of single-mode error channels makes every Gaussian measurement separable.

The main route reduces each channel to amplification followed by loss and
compares the summed losses against one. A second, independent route applies
the dual channels to POVM elements and tests the result for entanglement.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    CanonicalForm,
    CanonicalKind,
    ChannelSpec,
    GaussianChannel,
    amp,
    apply_channel,
    build,
    compose,
    dual,
    identity_channel,
    loss,
    to_amp_then_loss,
)
from .criteria import PPT_TOL, log_negativity, ppt_margin
from .exceptions import GaussepError, UnsupportedChannelError
from .measurements import DEFAULT_R_REG, MeasurementSpec, cv_bell, povm_element_state

BOUNDARY_TOL = 1e-12
FZ_TOL = 1e-12

ALL_SEPARABLE = "all_separable"
INSEPARABLE_EXISTS = "inseparable_exists"


@dataclass(frozen=True)
class DecisionReport:
    verdict: str
    canonical_A: CanonicalForm
    canonical_B: CanonicalForm
    rule_trace: tuple[str, ...]
    threshold_value: float | None = None
    margin: float | None = None
    boundary: bool = False

    @property
    def all_separable(self) -> bool:
        return self.verdict == ALL_SEPARABLE

    def to_record(self) -> dict:
        """Flat, JSON-friendly view of the report."""
        rec = {
            "verdict": self.verdict,
            "boundary": self.boundary,
            "threshold_value": self.threshold_value,
            "margin": self.margin,
        }
        for side, form in (("A", self.canonical_A), ("B", self.canonical_B)):
            rec[f"kind_{side}"] = form.kind.value
            rec[f"a_{side}"] = form.a
            rec[f"l_{side}"] = form.l
        rec["rule_trace"] = list(self.rule_trace)
        return rec


def _effective_loss(side: str, form: CanonicalForm, trace: list[str]) -> float:
    if form.kind is CanonicalKind.B1_EQUIVALENT:
        trace.append(f"{side}: single-quadrature noise treated as identity (l'=0)")
        return 0.0
    if form.kind is CanonicalKind.IDENTITY:
        trace.append(f"{side}: identity (a'=1, l'=0)")
        return 0.0
    trace.append(f"{side}: amplification then loss a'={form.a:.12g} l'={form.l:.12g}")
    return form.l


def all_measurements_separable(spec_A: ChannelSpec, spec_B: ChannelSpec) -> DecisionReport:
    """Are all effective two-mode Gaussian measurements after ``spec_A (x) spec_B`` separable?

    1. An entanglement-breaking channel on either side settles it: separable.
    2. Channels equivalent to single-quadrature noise count as the identity.
    3. Otherwise, with both channels written as amplification then loss,
       every measurement is separable iff ``l'_A + l'_B >= 1``; the
       amplification parameters play no role.
    """
    forms = {"A": to_amp_then_loss(spec_A), "B": to_amp_then_loss(spec_B)}
    trace: list[str] = []
    eb = [side for side, f in forms.items() if f.kind is CanonicalKind.ENTANGLEMENT_BREAKING]
    if eb:
        for side in eb:
            trace.append(f"{side}: entanglement-breaking channel")
        trace.append("entanglement-breaking short-circuit -> all_separable")
        return DecisionReport(ALL_SEPARABLE, forms["A"], forms["B"], tuple(trace))

    total = sum(_effective_loss(side, forms[side], trace) for side in ("A", "B"))
    margin = total - 1.0
    boundary = abs(margin) <= BOUNDARY_TOL
    verdict = ALL_SEPARABLE if margin >= -BOUNDARY_TOL else INSEPARABLE_EXISTS
    cmp = ">=" if verdict == ALL_SEPARABLE else "<"
    trace.append(f"l'_A + l'_B = {total:.12g} {cmp} 1 -> {verdict}" + (" (boundary)" if boundary else ""))
    return DecisionReport(verdict, forms["A"], forms["B"], tuple(trace), total, margin, boundary)


# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
# Entanglement annihilation (dual side)
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~


@dataclass(frozen=True)
class KappaMu:
    """Phase-insensitive channel ``V -> kappa V + mu I``."""

    kappa: float
    mu: float

    def __post_init__(self):
        if self.kappa < 0 or self.mu < 0:
            raise GaussepError(f"kappa and mu must be non-negative, got {self.kappa}, {self.mu}")
        if self.mu < abs(1.0 - self.kappa) / 2 - 1e-12:
            raise GaussepError(f"kappa={self.kappa}, mu={self.mu} is not completely positive")

    def channel(self) -> GaussianChannel:
        return GaussianChannel(np.sqrt(self.kappa) * np.eye(2), self.mu * np.eye(2))


def amp_loss_to_kappa_mu(a: float, l: float) -> KappaMu:
    """Amplification ``a`` then loss ``l`` as ``kappa = a(1-l)``, ``mu = kappa/2 + l - 1/2``."""
    if a < 1 or not 0 <= l < 1:
        raise GaussepError(f"need a >= 1 and 0 <= l < 1, got a={a}, l={l}")
    kappa = a * (1 - l)
    mu = kappa / 2 + l - 0.5
    return KappaMu(kappa, max(mu, 0.0))


def fz_annihilates(A: KappaMu, B: KappaMu, tol: float = FZ_TOL) -> bool:
    """Does ``Phi_A (x) Phi_B`` make every two-mode Gaussian state separable?

    Holds iff ``kappa_A mu_B + kappa_B mu_A >= (kappa_A + kappa_B) / 2``,
    equality included.
    """
    lhs = A.kappa * B.mu + B.kappa * A.mu
    rhs = (A.kappa + B.kappa) / 2
    return lhs - rhs >= -tol * max(1.0, abs(lhs), abs(rhs))


def amp_loss_annihilates(a_A: float, a_B: float, tol: float = FZ_TOL) -> bool:
    """Annihilation test for amplification-then-loss pairs: ``1/a_A + 1/a_B <= 1``."""
    return 1.0 / a_A + 1.0 / a_B <= 1.0 + tol


@dataclass(frozen=True)
class DualCheck:
    separable: bool
    margin: float
    log_negativity: float
    dual_A: str
    dual_B: str

    def to_record(self) -> dict:
        return {
            "separable": self.separable,
            "margin": self.margin,
            "log_negativity": self.log_negativity,
            "dual_A": self.dual_A,
            "dual_B": self.dual_B,
        }


def dual_channel_for(channel_spec: ChannelSpec) -> tuple[GaussianChannel | None, str]:
    """Dual of a channel, routed through its amplification-then-loss form.

    Returns ``(None, ...)`` for channels with singular ``X`` (complete loss
    of a quadrature): their duals send every operator to a multiple of the
    identity on that mode.
    """
    form = to_amp_then_loss(channel_spec)
    if form.kind is CanonicalKind.IDENTITY:
        return identity_channel(), "identity"
    if form.kind is CanonicalKind.AMP_THEN_LOSS:
        a_star = 1.0 / (1.0 - form.l)
        l_star = 1.0 - 1.0 / form.a
        return compose(loss(l_star), amp(a_star)), f"amp:{a_star:.12g},loss:{l_star:.12g}"
    ch = build(channel_spec)
    if abs(np.linalg.det(ch.X)) <= 1e-12:
        return None, "trace (identity operator)"
    d = dual(GaussianChannel(ch.X, ch.Y))
    return d, f"raw dual of {form.kind.value}"


def dual_povm_check(
    measurement: MeasurementSpec,
    spec_A: ChannelSpec,
    spec_B: ChannelSpec,
    r_reg: float = DEFAULT_R_REG,
    tol: float = PPT_TOL,
) -> DualCheck:
    """Apply the dual channels to a regularised POVM element and run the PPT test.

    For a loss channel ``l`` the dual is amplification ``1/(1-l)``; for
    amplification ``a`` it is loss ``1 - 1/a``. A mode whose channel
    discards it entirely makes the element a product, reported with an
    infinite margin.
    """
    if measurement.num_modes != 2:
        raise UnsupportedChannelError("dual check needs a two-mode measurement")
    dA, nameA = dual_channel_for(spec_A)
    dB, nameB = dual_channel_for(spec_B)
    if dA is None or dB is None:
        return DualCheck(True, float("inf"), 0.0, nameA, nameB)
    state = povm_element_state(measurement, r_reg)
    state = apply_channel(dA, state, 0)
    state = apply_channel(dB, state, 1)
    margin = ppt_margin(state.cov)
    return DualCheck(margin >= -tol, margin, log_negativity(state.cov), nameA, nameB)


# ~~~~~~~~~~~~~~~~~~~~~~~~~
# Three-way cross-validation
# ~~~~~~~~~~~~~~~~~~~~~~~~~

ENTANGLED_LOGNEG = 1e-6
SEPARABLE_LOGNEG = 1e-8


@dataclass(frozen=True)
class ConsistencyReport:
    decision: DecisionReport
    swap_log_negativity: float
    dual: DualCheck
    agree: bool
    diagnostics: tuple[str, ...] = field(default=())

    def to_record(self) -> dict:
        return {
            "agree": self.agree,
            "decision": self.decision.to_record(),
            "swap_log_negativity": self.swap_log_negativity,
            "dual": self.dual.to_record(),
            "diagnostics": list(self.diagnostics),
        }


def decision_consistency(
    spec_A: ChannelSpec,
    spec_B: ChannelSpec,
    r: float = 5.0,
    r_reg: float = DEFAULT_R_REG,
) -> ConsistencyReport:
    """Cross-check the decision against a CV Bell swap at squeezing ``r`` and the dual route.

    Channels equivalent to single-quadrature noise are rejected: the CV Bell
    measurement is not the witnessing measurement for them. A disagreement
    is reported (and warned about), never silently resolved.
    """
    from .swapping import swap_output

    report = all_measurements_separable(spec_A, spec_B)
    if CanonicalKind.B1_EQUIVALENT in (report.canonical_A.kind, report.canonical_B.kind):
        raise UnsupportedChannelError("single-quadrature noise channels are not covered by the CV Bell cross-check")
    out = swap_output(build(spec_A), build(spec_B), r, cv_bell())
    ln = log_negativity(out.cov)
    dual_res = dual_povm_check(cv_bell(), spec_A, spec_B, r_reg)

    diagnostics = []
    if report.all_separable:
        if ln > SEPARABLE_LOGNEG:
            diagnostics.append(f"decision says all_separable but swap log-negativity is {ln:.3g}")
        if not dual_res.separable:
            diagnostics.append(f"decision says all_separable but dual-route margin is {dual_res.margin:.3g}")
    else:
        if ln <= ENTANGLED_LOGNEG:
            diagnostics.append(f"decision says inseparable_exists but swap log-negativity is {ln:.3g}")
        if dual_res.separable:
            diagnostics.append(f"decision says inseparable_exists but dual-route element is separable ({dual_res.margin:.3g})")
    if diagnostics:
        warnings.warn("; ".join(diagnostics), RuntimeWarning, stacklevel=2)
    return ConsistencyReport(report, ln, dual_res, not diagnostics, tuple(diagnostics))

