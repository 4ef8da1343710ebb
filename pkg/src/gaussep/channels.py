"""Single-mode Gaussian channels as affine covariance maps ``V -> X V X^T + Y``.

Channels are built from a small set of primitives (loss, amplification,
added noise, single-quadrature noise, rotations and squeezers) that can be
composed, applied to states, classified, dualised, and reduced to the
amplification-then-loss form used by the separability decision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .exceptions import GaussepError, UnsupportedChannelError
from .gaussian_core import GaussianState, _quadrature_indices, omega, rotation, squeezer

CP_TOL = 1e-10
EB_TOL = 1e-12
CLAMP_TOL = 1e-12
CONSISTENCY_TOL = 1e-9
_DET_TOL = 1e-12

PRIMITIVE_OPS = ("loss", "amp", "noise", "b1", "rotate", "squeeze")
_PARAM_KEYS = {
    "loss": ("l",),
    "amp": ("a",),
    "noise": ("n",),
    "b1": ("eps", "quad"),
    "rotate": ("theta",),
    "squeeze": ("z",),
}


# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
# Channel specifications (serialisable)
# ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~


@dataclass(frozen=True)
class Primitive:
    """One primitive step of a channel specification."""

    op: str
    l: float | None = None
    a: float | None = None
    n: float | None = None
    eps: float | None = None
    quad: str | None = None
    theta: float | None = None
    z: float | None = None

    def __post_init__(self):
        if self.op not in _PARAM_KEYS:
            raise GaussepError(f"unknown channel primitive {self.op!r}")
        for key in _PARAM_KEYS[self.op]:
            if getattr(self, key) is None:
                raise GaussepError(f"primitive {self.op!r} needs parameter {key!r}")
        for key in ("l", "a", "n", "eps", "theta", "z"):
            val = getattr(self, key)
            if val is not None:
                if key not in _PARAM_KEYS[self.op]:
                    raise GaussepError(f"primitive {self.op!r} takes no parameter {key!r}")
                if not np.isfinite(val):
                    raise GaussepError(f"parameter {key} of {self.op!r} must be finite")
                object.__setattr__(self, key, float(val))
        if self.quad is not None and self.op != "b1":
            raise GaussepError(f"primitive {self.op!r} takes no parameter 'quad'")
        # range checks
        _primitive_channel(self)

    def to_dict(self) -> dict:
        out = {"op": self.op}
        for key in _PARAM_KEYS[self.op]:
            out[key] = getattr(self, key)
        return out

    @classmethod
    def from_dict(cls, record: dict) -> "Primitive":
        if not isinstance(record, dict) or "op" not in record:
            raise GaussepError(f"channel record must be an object with an 'op' key: {record!r}")
        allowed = {"op", "l", "a", "n", "eps", "quad", "theta", "z"}
        extra = set(record) - allowed
        if extra:
            raise GaussepError(f"unknown keys {sorted(extra)} in channel record")
        return cls(**record)

    def __str__(self) -> str:
        vals = [str(getattr(self, k)) for k in _PARAM_KEYS[self.op]]
        return ":".join([self.op, *vals])


@dataclass(frozen=True)
class ChannelSpec:
    """Ordered list of primitives; the first entry acts first."""

    steps: tuple[Primitive, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def then(self, other: "ChannelSpec") -> "ChannelSpec":
        return ChannelSpec(self.steps + other.steps)

    def to_records(self) -> list[dict]:
        return [p.to_dict() for p in self.steps]

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "ChannelSpec":
        return cls(tuple(Primitive.from_dict(dict(r)) for r in records))

    @classmethod
    def from_json(cls, text: str) -> "ChannelSpec":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GaussepError(f"invalid channel spec JSON: {exc}") from None
        if not isinstance(records, list):
            raise GaussepError("channel spec JSON must be a list of records")
        return cls.from_records(records)

    @classmethod
    def parse(cls, text: str) -> "ChannelSpec":
        """Parse the inline grammar ``op:param[:param],op:param,...``.

        ``identity`` or an empty string gives the empty spec.
        """
        text = text.strip()
        if text in ("", "identity", "id"):
            return cls()
        steps = []
        for token in text.split(","):
            parts = [p.strip() for p in token.strip().split(":")]
            op, args = parts[0], parts[1:]
            if op not in _PARAM_KEYS:
                raise GaussepError(f"unknown channel primitive {op!r} in {text!r}")
            keys = _PARAM_KEYS[op]
            if op == "b1" and len(args) == 1:
                args.append("x")
            if len(args) != len(keys):
                raise GaussepError(f"primitive {op!r} expects {len(keys)} parameter(s), got {token!r}")
            kwargs = {}
            for key, raw in zip(keys, args):
                if key == "quad":
                    kwargs[key] = raw
                else:
                    try:
                        kwargs[key] = float(raw)
                    except ValueError:
                        raise GaussepError(f"bad number {raw!r} in {token!r}") from None
            steps.append(Primitive(op, **kwargs))
        return cls(tuple(steps))

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.steps) or "identity"


def spec(*steps: Primitive) -> ChannelSpec:
    return ChannelSpec(tuple(steps))


# ~~~~~~~~~~~~~~~~
# Channel matrices
# ~~~~~~~~~~~~~~~~


@dataclass(frozen=True)
class GaussianChannel:
    """Affine covariance map ``V -> X V X^T + Y`` on ``num_modes`` modes."""

    X: np.ndarray
    Y: np.ndarray
    provenance: ChannelSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        if X.ndim != 2 or X.shape != Y.shape or X.shape[0] != X.shape[1] or X.shape[0] % 2:
            raise GaussepError(f"X and Y must be equal-sized even square matrices, got {X.shape}, {Y.shape}")
        if np.max(np.abs(Y - Y.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(Y))):
            raise GaussepError("Y must be symmetric")
        Y = (Y + Y.T) / 2
        if not _is_cp(X, Y):
            raise GaussepError("(X, Y) is not a completely positive Gaussian channel")
        X.flags.writeable = False
        Y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def num_modes(self) -> int:
        return self.X.shape[0] // 2

    def __call__(self, cov: np.ndarray) -> np.ndarray:
        return self.X @ cov @ self.X.T + self.Y


def _is_cp(X: np.ndarray, Y: np.ndarray, tol: float = CP_TOL) -> bool:
    m = X.shape[0] // 2
    Om = omega(m)
    if np.linalg.eigvalsh(Y)[0] < -tol:
        return False
    herm = Y + 0.5j * (Om - X @ Om @ X.T)
    scale = max(1.0, float(np.max(np.abs(Y))))
    return bool(np.linalg.eigvalsh(herm)[0] >= -tol * scale)


def identity_channel(num_modes: int = 1) -> GaussianChannel:
    n = 2 * num_modes
    return GaussianChannel(np.eye(n), np.zeros((n, n)), ChannelSpec())


def _primitive_channel(p: Primitive) -> GaussianChannel:
    I2 = np.eye(2)
    if p.op == "loss":
        if not 0.0 <= p.l <= 1.0:
            raise GaussepError(f"loss parameter must lie in [0, 1], got {p.l}")
        X, Y = np.sqrt(1.0 - p.l) * I2, 0.5 * p.l * I2
    elif p.op == "amp":
        if p.a < 1.0:
            raise GaussepError(f"amplification parameter must be >= 1, got {p.a}")
        X, Y = np.sqrt(p.a) * I2, 0.5 * (p.a - 1.0) * I2
    elif p.op == "noise":
        if p.n < 0.0:
            raise GaussepError(f"noise parameter must be >= 0, got {p.n}")
        X, Y = I2, p.n * I2
    elif p.op == "b1":
        if p.eps <= 0.0:
            raise GaussepError(f"b1 noise must be > 0, got {p.eps}")
        if p.quad not in ("x", "p"):
            raise GaussepError(f"b1 quadrature must be 'x' or 'p', got {p.quad!r}")
        X, Y = I2, np.diag([p.eps, 0.0] if p.quad == "x" else [0.0, p.eps])
    elif p.op == "rotate":
        X, Y = rotation(p.theta), np.zeros((2, 2))
    else:  # squeeze
        X, Y = squeezer(p.z), np.zeros((2, 2))
    return GaussianChannel(X, Y)


def loss(l: float) -> GaussianChannel:
    """Loss: ``V -> (1-l) V + l I/2`` for ``0 <= l <= 1``."""
    return build(spec(Primitive("loss", l=l)))


def amp(a: float) -> GaussianChannel:
    """Phase-insensitive amplification: ``V -> a V + (a-1) I/2`` for ``a >= 1``."""
    return build(spec(Primitive("amp", a=a)))


def noise(n: float) -> GaussianChannel:
    """Added classical noise: ``V -> V + n I``."""
    return build(spec(Primitive("noise", n=n)))


def b1(eps: float, quad: str = "x") -> GaussianChannel:
    """Noise ``eps`` added to a single quadrature."""
    return build(spec(Primitive("b1", eps=eps, quad=quad)))


def rotate(theta: float) -> GaussianChannel:
    return build(spec(Primitive("rotate", theta=theta)))


def squeeze(z: float) -> GaussianChannel:
    return build(spec(Primitive("squeeze", z=z)))


def compose(second: GaussianChannel, first: GaussianChannel) -> GaussianChannel:
    """Channel that applies ``first`` and then ``second``."""
    if second.X.shape != first.X.shape:
        raise GaussepError("cannot compose channels on different numbers of modes")
    X = second.X @ first.X
    Y = second.X @ first.Y @ second.X.T + second.Y
    prov = None
    if first.provenance is not None and second.provenance is not None:
        prov = first.provenance.then(second.provenance)
    return GaussianChannel(X, (Y + Y.T) / 2, prov)


def build(channel_spec: ChannelSpec) -> GaussianChannel:
    """Compose the primitives of ``channel_spec`` into a single channel."""
    out = identity_channel(1)
    for p in channel_spec:
        out = compose(_primitive_channel(p), out)
    return GaussianChannel(out.X, out.Y, channel_spec)


def apply_channel(channel: GaussianChannel, state: GaussianState, target_modes: int | Sequence[int]) -> GaussianState:
    """Apply ``channel`` to ``target_modes`` of ``state``, leaving the others alone."""
    if isinstance(target_modes, (int, np.integer)):
        target_modes = [int(target_modes)]
    target_modes = list(target_modes)
    if len(target_modes) != channel.num_modes:
        raise GaussepError(f"{channel.num_modes}-mode channel given {len(target_modes)} target modes")
    idx = _quadrature_indices(target_modes, state.num_modes)
    n = state.cov.shape[0]
    X = np.eye(n)
    Y = np.zeros((n, n))
    X[np.ix_(idx, idx)] = channel.X
    Y[np.ix_(idx, idx)] = channel.Y
    cov = X @ state.cov @ X.T + Y
    return GaussianState((cov + cov.T) / 2, X @ state.mean)


# ~~~~~~~~~~~~~~
# Classification
# ~~~~~~~~~~~~~~


class HolevoType(str, Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"
    C1 = "C1"
    C2 = "C2"
    D = "D"


def _as_channel(c: GaussianChannel | ChannelSpec) -> GaussianChannel:
    if isinstance(c, ChannelSpec):
        return build(c)
    if isinstance(c, GaussianChannel):
        return c
    raise TypeError(f"expected a ChannelSpec or GaussianChannel, got {type(c).__name__}")


def _single_mode(c: GaussianChannel) -> None:
    if c.num_modes != 1:
        raise UnsupportedChannelError("only single-mode channels are supported")


def _y_rank(Y: np.ndarray) -> int:
    w = np.linalg.eigvalsh(Y)
    scale = max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(w > _DET_TOL * scale))


def classify(c: GaussianChannel | ChannelSpec) -> HolevoType:
    """Holevo family of a single-mode channel, read off ``det X`` and ``rank Y``.

    The identity channel (``det X = 1``, ``Y = 0``) is reported as ``B2``.
    """
    ch = _as_channel(c)
    _single_mode(ch)
    det = float(np.linalg.det(ch.X))
    if abs(det) <= _DET_TOL:
        return HolevoType.A
    if abs(det - 1.0) <= _DET_TOL:
        return HolevoType.B1 if _y_rank(ch.Y) == 1 else HolevoType.B2
    if det < 0:
        return HolevoType.D
    return HolevoType.C1 if det < 1 else HolevoType.C2


def _is_b1_like(ch: GaussianChannel) -> bool:
    return abs(float(np.linalg.det(ch.X)) - 1.0) <= _DET_TOL and _y_rank(ch.Y) == 1


def phase_insensitive_params(c: GaussianChannel) -> tuple[float, float] | None:
    """Return ``(kappa, mu)`` with ``V -> kappa V + mu I`` up to a rotation, else None.

    Rotations commute with phase-insensitive channels, so ``X`` may be any
    non-negative multiple of a rotation matrix.
    """
    _single_mode(c)
    X, Y = c.X, c.Y
    kappa = float(np.linalg.det(X))
    if kappa < -_DET_TOL:
        return None
    kappa = max(kappa, 0.0)
    scale = max(1.0, kappa)
    if np.max(np.abs(X @ X.T - kappa * np.eye(2))) > 1e-12 * scale:
        return None
    mu = float(np.trace(Y)) / 2
    if np.max(np.abs(Y - mu * np.eye(2))) > 1e-12 * max(1.0, abs(mu)):
        return None
    return kappa, mu


def _spec_kappa_mu(channel_spec: ChannelSpec) -> tuple[float, float] | None:
    # Exact recurrence for phase-insensitive primitive chains; avoids the
    # sqrt round trip through X.
    kappa, mu = 1.0, 0.0
    for p in channel_spec:
        if p.op == "loss":
            kappa, mu = (1 - p.l) * kappa, (1 - p.l) * mu + p.l / 2
        elif p.op == "amp":
            kappa, mu = p.a * kappa, p.a * mu + (p.a - 1) / 2
        elif p.op == "noise":
            mu = mu + p.n
        elif p.op != "rotate":
            return None
    return kappa, mu


def _kappa_mu(c: GaussianChannel | ChannelSpec) -> tuple[GaussianChannel, tuple[float, float] | None]:
    if isinstance(c, ChannelSpec):
        exact = _spec_kappa_mu(c)
        ch = build(c)
        return ch, exact if exact is not None else phase_insensitive_params(ch)
    ch = _as_channel(c)
    _single_mode(ch)
    return ch, phase_insensitive_params(ch)


def is_entanglement_breaking(c: GaussianChannel | ChannelSpec) -> bool:
    """Entanglement-breaking test for phase-insensitive channels.

    ``V -> kappa V + mu I`` is entanglement breaking iff
    ``mu >= (1 + kappa) / 2``, equality included. Exact single-quadrature
    noise channels are never entanglement breaking.
    """
    ch, params = _kappa_mu(c)
    if params is None:
        if _is_b1_like(ch):
            return False
        raise UnsupportedChannelError("entanglement-breaking test needs a phase-insensitive channel")
    kappa, mu = params
    return mu >= (1.0 + kappa) / 2 - EB_TOL


# ~~~~~~~~~~~~~~~~~~~~~~~~~~
# Amplification-then-loss form
# ~~~~~~~~~~~~~~~~~~~~~~~~~~


class CanonicalKind(str, Enum):
    AMP_THEN_LOSS = "amp_then_loss"
    B1_EQUIVALENT = "b1_equivalent"
    ENTANGLEMENT_BREAKING = "entanglement_breaking"
    IDENTITY = "identity"


@dataclass(frozen=True)
class CanonicalForm:
    """Reduced form of a channel up to single-mode unitaries.

    ``a`` and ``l`` are set for ``AMP_THEN_LOSS`` and ``IDENTITY``
    (the latter as ``a = 1, l = 0``).
    """

    kind: CanonicalKind
    a: float | None = None
    l: float | None = None

    def __post_init__(self):
        if self.kind is CanonicalKind.AMP_THEN_LOSS:
            if self.a is None or self.l is None or self.a < 1.0 or not 0.0 <= self.l <= 1.0:
                raise GaussepError(f"invalid amplification-then-loss parameters a={self.a}, l={self.l}")

    def channel(self) -> GaussianChannel:
        """The amplification-then-loss channel this form stands for."""
        if self.kind in (CanonicalKind.AMP_THEN_LOSS, CanonicalKind.IDENTITY):
            return amp_then_loss(self.a, self.l)
        if self.kind is CanonicalKind.B1_EQUIVALENT:
            return identity_channel()
        raise UnsupportedChannelError("entanglement-breaking channels have no amplification-then-loss form")


def amp_then_loss(a: float, l: float) -> GaussianChannel:
    """``V -> a(1-l) V + (a(1-l) + 2l - 1) I/2``."""
    return build(spec(Primitive("amp", a=a), Primitive("loss", l=l)))


def _clamp(val: float, lo: float, hi: float, name: str) -> float:
    if val < lo - CONSISTENCY_TOL or val > hi + CONSISTENCY_TOL:
        raise ArithmeticError(f"internal inconsistency: {name} = {val!r} outside [{lo}, {hi}]")
    if lo - CLAMP_TOL <= val < lo:
        return lo
    if hi < val <= hi + CLAMP_TOL:
        return hi
    return min(max(val, lo), hi)


def to_amp_then_loss(c: ChannelSpec | GaussianChannel) -> CanonicalForm:
    """Reduce a channel to amplification followed by loss.

    Matching ``V -> kappa V + mu I`` to the amplification-then-loss map gives
    ``l' = (2 mu - kappa + 1) / 2`` and ``a' = kappa / (1 - l')``.
    Entanglement-breaking channels and channels equivalent to noise on one
    quadrature are reported as such instead.
    """
    ch, params = _kappa_mu(c)
    if params is None:
        if _is_b1_like(ch):
            return CanonicalForm(CanonicalKind.B1_EQUIVALENT)
        if abs(float(np.linalg.det(ch.X)) - 1.0) <= _DET_TOL and _y_rank(ch.Y) == 0:
            return CanonicalForm(CanonicalKind.IDENTITY, a=1.0, l=0.0)
        raise UnsupportedChannelError(
            "channel is neither phase-insensitive nor equivalent to single-quadrature noise"
        )
    kappa, mu = params
    if mu >= (1.0 + kappa) / 2 - EB_TOL:
        return CanonicalForm(CanonicalKind.ENTANGLEMENT_BREAKING)
    if abs(kappa - 1.0) <= 1e-12 and abs(mu) <= 1e-12:
        return CanonicalForm(CanonicalKind.IDENTITY, a=1.0, l=0.0)
    l_new = _clamp((2 * mu - kappa + 1) / 2, 0.0, 1.0, "l'")
    a_new = _clamp(kappa / (1 - l_new), 1.0, np.inf, "a'")
    return CanonicalForm(CanonicalKind.AMP_THEN_LOSS, a=a_new, l=l_new)


# ~~~~~
# Duals
# ~~~~~


def dual(c: GaussianChannel) -> GaussianChannel:
    """Dual channel on Gaussian operators, up to normalisation.

    Uses ``Gamma -> X^-1 (Gamma + Y) X^-T``, which sends ``loss(l)`` to
    ``amp(1/(1-l))`` and ``amp(a)`` to ``loss(1 - 1/a)``. A composition is
    dualised in reverse order.
    """
    _single_mode(c)
    if c.provenance is not None:
        for p in c.provenance:
            if p.op in ("noise", "b1"):
                raise UnsupportedChannelError(
                    f"dual of a {p.op!r} primitive is not supported; convert with to_amp_then_loss first"
                )
    if abs(np.linalg.det(c.X)) <= _DET_TOL:
        raise UnsupportedChannelError("channel has no finite dual (singular X, e.g. complete loss)")
    Xi = np.linalg.inv(c.X)
    Y = Xi @ c.Y @ Xi.T
    prov = dual_spec(c.provenance) if c.provenance is not None else None
    return GaussianChannel(Xi, (Y + Y.T) / 2, prov)


def _dual_primitive(p: Primitive) -> Primitive:
    if p.op == "loss":
        if p.l >= 1.0:
            raise UnsupportedChannelError("loss(1) has no finite dual amplification")
        return Primitive("amp", a=1.0 / (1.0 - p.l))
    if p.op == "amp":
        return Primitive("loss", l=1.0 - 1.0 / p.a)
    if p.op == "rotate":
        return Primitive("rotate", theta=-p.theta)
    if p.op == "squeeze":
        return Primitive("squeeze", z=-p.z)
    raise UnsupportedChannelError(
        f"dual of a {p.op!r} primitive is not supported; convert with to_amp_then_loss first"
    )


def dual_spec(channel_spec: ChannelSpec) -> ChannelSpec:
    """Primitive-by-primitive dual, in reverse order."""
    return ChannelSpec(tuple(_dual_primitive(p) for p in reversed(channel_spec.steps)))
