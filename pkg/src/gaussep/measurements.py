"""Gaussian measurements: a Gaussian unitary followed by per-mode homodyne/heterodyne.

Conditional covariance updates do not depend on the measurement outcome, so
only covariance matrices are tracked and means are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import GaussepError
from .gaussian_core import (
    GaussianState,
    _quadrature_indices,
    beamsplitter,
    embed,
    is_symplectic,
    rotation,
)

HOMODYNE_X = "homodyne_x"
HETERODYNE = "heterodyne"
KEEP = "keep"
_TAGS = (HOMODYNE_X, HETERODYNE, KEEP)

PINV_CUTOFF = 1e-12
DEFAULT_R_REG = 5.0


@dataclass(frozen=True)
class MeasurementSpec:
    """Gaussian unitary ``S`` followed by a measurement pattern, one tag per mode."""

    S: np.ndarray
    pattern: tuple[str, ...]

    def __post_init__(self):
        S = np.array(self.S, dtype=float)
        pattern = tuple(self.pattern)
        if S.shape != (2 * len(pattern), 2 * len(pattern)):
            raise GaussepError(f"unitary of shape {S.shape} does not match pattern of length {len(pattern)}")
        bad = [t for t in pattern if t not in _TAGS]
        if bad:
            raise GaussepError(f"unknown measurement tags {bad}")
        if all(t == KEEP for t in pattern):
            raise GaussepError("measurement must measure at least one mode")
        if not is_symplectic(S):
            raise GaussepError("measurement unitary is not symplectic")
        S.flags.writeable = False
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "pattern", pattern)

    @property
    def num_modes(self) -> int:
        return len(self.pattern)

    @property
    def homodyne_count(self) -> int:
        return sum(t == HOMODYNE_X for t in self.pattern)


def cv_bell() -> MeasurementSpec:
    """Continuous-variable Bell measurement on two modes.

    A balanced beamsplitter outputs ``(a - b)/sqrt2`` on mode 0 and
    ``(a + b)/sqrt2`` on mode 1; ``x`` is measured on mode 0 and ``p`` on
    mode 1 (a quarter-turn rotation turns it into an ``x`` measurement).
    """
    S = rotation(np.pi / 2, 1, 2) @ beamsplitter(0.5, (1, 0), 2)
    return MeasurementSpec(S, (HOMODYNE_X, HOMODYNE_X))


def heterodyne_pair() -> MeasurementSpec:
    """Independent heterodyne of two modes; a separable measurement."""
    return MeasurementSpec(np.eye(4), (HETERODYNE, HETERODYNE))


def _conditional_cov(cov: np.ndarray, kept: list[int], observed: list[int], noise: np.ndarray) -> np.ndarray:
    A = cov[np.ix_(kept, kept)]
    B = cov[np.ix_(kept, observed)]
    C = cov[np.ix_(observed, observed)] + noise
    w, U = np.linalg.eigh((C + C.T) / 2)
    inv_w = np.where(w > PINV_CUTOFF, 1.0 / np.where(w > PINV_CUTOFF, w, 1.0), 0.0)
    C_pinv = (U * inv_w) @ U.T
    out = A - B @ C_pinv @ B.T
    return (out + out.T) / 2


def condition_on_measurement(
    state: GaussianState, spec: MeasurementSpec, measured_modes: Sequence[int]
) -> GaussianState:
    """State of the unmeasured modes after ``spec`` acts on ``measured_modes``.

    ``measured_modes[i]`` is the state mode that plays the role of mode ``i``
    of ``spec``. Modes tagged ``keep`` stay in the output along with every
    mode ``spec`` does not touch; output modes keep their original order.
    Homodyne conditioning uses ``A - B (P C P)^+ B^T`` and heterodyne uses
    ``A - B (C + I/2)^-1 B^T``.
    """
    measured_modes = list(measured_modes)
    if len(measured_modes) != spec.num_modes:
        raise GaussepError(f"measurement acts on {spec.num_modes} modes, got {len(measured_modes)}")
    m = state.num_modes
    _quadrature_indices(measured_modes, m)
    S = embed(spec.S, measured_modes, m)
    cov = S @ state.cov @ S.T

    observed: list[int] = []
    noise_diag: list[float] = []
    gone = set()
    for mode, tag in zip(measured_modes, spec.pattern):
        if tag == HOMODYNE_X:
            observed.append(2 * mode)
            noise_diag.append(0.0)
        elif tag == HETERODYNE:
            observed.extend((2 * mode, 2 * mode + 1))
            noise_diag.extend((0.5, 0.5))
        else:
            continue
        gone.add(mode)
    remaining = [k for k in range(m) if k not in gone]
    if not remaining:
        raise GaussepError("no modes left after the measurement")
    kept = [i for k in remaining for i in (2 * k, 2 * k + 1)]
    return GaussianState(_conditional_cov(cov, kept, observed, np.diag(noise_diag)))


def povm_element_state(spec: MeasurementSpec, r_reg: float = DEFAULT_R_REG) -> GaussianState:
    """Pure Gaussian state proportional to the POVM element at the origin.

    Homodyne modes are seeded with squeezed vacuum ``diag(e^-2r, e^2r)/2``
    standing in for the improper ``|x=0>``; heterodyne modes with vacuum.
    The seed is pulled back through ``S^-1``.
    """
    if not r_reg > 0:
        raise GaussepError(f"regulariser must be positive, got {r_reg}")
    if KEEP in spec.pattern:
        raise GaussepError("POVM elements are only defined when every mode is measured")
    seed = np.zeros((2 * spec.num_modes, 2 * spec.num_modes))
    for k, tag in enumerate(spec.pattern):
        block = np.diag([np.exp(-2 * r_reg), np.exp(2 * r_reg)]) / 2 if tag == HOMODYNE_X else np.eye(2) / 2
        seed[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = block
    S_inv = np.linalg.inv(spec.S)
    cov = S_inv @ seed @ S_inv.T
    return GaussianState((cov + cov.T) / 2)
