"""Entanglement tests for two-mode Gaussian states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateMarginalError, GaussepError, NotStandardFormError, UnphysicalError
from .gaussian_core import is_physical, symplectic_eigenvalues

PPT_TOL = 1e-9
DUAN_TOL = 1e-9
STANDARD_FORM_TOL = 1e-9

_PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class StandardFormParams:
    """``n_A``, ``n_B``, ``c`` of the covariance matrix

    ::

        [[n_A, 0,   c,   0  ],
         [0,   n_A, 0,   -c ],
         [c,   0,   n_B, 0  ],
         [0,   -c,  0,   n_B]]
    """

    n_A: float
    n_B: float
    c: float

    def matrix(self) -> np.ndarray:
        nA, nB, c = self.n_A, self.n_B, self.c
        return np.array(
            [
                [nA, 0.0, c, 0.0],
                [0.0, nA, 0.0, -c],
                [c, 0.0, nB, 0.0],
                [0.0, -c, 0.0, nB],
            ]
        )


def _two_mode(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise GaussepError(f"expected a 4x4 two-mode covariance matrix, got {cov.shape}")
    return cov


def extract_standard_form(cov: np.ndarray, tol: float = STANDARD_FORM_TOL) -> StandardFormParams:
    """Read ``(n_A, n_B, c)`` off a covariance matrix already in standard form."""
    cov = _two_mode(cov)
    params = StandardFormParams(
        n_A=(cov[0, 0] + cov[1, 1]) / 2,
        n_B=(cov[2, 2] + cov[3, 3]) / 2,
        c=(cov[0, 2] + cov[2, 0] - cov[1, 3] - cov[3, 1]) / 4,
    )
    scale = max(1.0, float(np.max(np.abs(cov))))
    if np.max(np.abs(cov - params.matrix())) > tol * scale or params.c < -tol * scale:
        raise NotStandardFormError("covariance matrix is not of the form diag blocks n I, off-diagonal diag(c, -c)")
    if params.c < 0:
        params = StandardFormParams(params.n_A, params.n_B, 0.0)
    return params


def duan_value(p: StandardFormParams) -> float:
    """Duan inseparability function; negative iff the standard-form state is entangled.

    ``2 a^2 n_A + 2 n_B / a^2 - 4 c - a^2 - 1/a^2`` with
    ``a^2 = sqrt((2 n_B - 1) / (2 n_A - 1))``. Entries use the vacuum = 1/2
    convention; the ``2n - 1`` terms already account for that.
    """
    if p.n_A <= 0.5 or p.n_B <= 0.5:
        raise DegenerateMarginalError(
            f"Duan function undefined for marginal variance <= 1/2 (n_A={p.n_A}, n_B={p.n_B})"
        )
    a2 = np.sqrt((2 * p.n_B - 1) / (2 * p.n_A - 1))
    return float(2 * a2 * p.n_A + 2 * p.n_B / a2 - 4 * p.c - a2 - 1 / a2)


def duan_entangled(p: StandardFormParams, tol: float = DUAN_TOL) -> bool:
    """Duan verdict with the same dead band as the PPT test.

    On the separability boundary the exact value is zero and double
    precision leaves residue of order ``1e-12 * n``; only a clearly negative
    value counts as entangled.
    """
    return duan_value(p) < -tol


def partial_transpose(cov: np.ndarray) -> np.ndarray:
    """Partial transpose on the second mode (``p_B -> -p_B``)."""
    cov = _two_mode(cov)
    return _PARTIAL_TRANSPOSE @ cov @ _PARTIAL_TRANSPOSE


def _standard_form_abs(cov: np.ndarray, tol: float = 1e-12) -> tuple[float, float, float] | None:
    # Off-diagonal diag(c, -c) with either sign of c; a local rotation by pi
    # flips the sign without changing the partially transposed spectrum.
    nA, nB = (cov[0, 0] + cov[1, 1]) / 2, (cov[2, 2] + cov[3, 3]) / 2
    c = (cov[0, 2] + cov[2, 0] - cov[1, 3] - cov[3, 1]) / 4
    ref = StandardFormParams(nA, nB, c).matrix()
    if np.max(np.abs(cov - ref)) > tol * max(1.0, float(np.max(np.abs(cov)))):
        return None
    return nA, nB, abs(c)


def min_pt_eigenvalue(cov: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of the partially transposed covariance.

    Standard-form input uses the closed form
    ``((n_A + n_B) - sqrt((n_A - n_B)^2 + 4 c^2)) / 2``, which stays accurate
    for strongly squeezed states; anything else goes through the general
    symplectic spectrum.
    """
    cov = _two_mode(cov)
    if not is_physical(cov):
        raise UnphysicalError("covariance matrix is not physical")
    std = _standard_form_abs(cov)
    if std is not None:
        nA, nB, c = std
        return float(((nA + nB) - np.hypot(nA - nB, 2 * c)) / 2)
    return float(symplectic_eigenvalues(partial_transpose(cov))[0])


def ppt_margin(cov: np.ndarray) -> float:
    """``nu_min(PT) - 1/2``: non-negative for separable states."""
    return min_pt_eigenvalue(cov) - 0.5


def ppt_separable(cov: np.ndarray, tol: float = PPT_TOL) -> bool:
    """PPT (Simon) test, necessary and sufficient for two-mode Gaussian states."""
    return ppt_margin(cov) >= -tol


def log_negativity(cov: np.ndarray) -> float:
    """``max(0, -ln(2 nu_min))`` for the partially transposed covariance."""
    return max(0.0, -float(np.log(2 * min_pt_eigenvalue(cov))))
