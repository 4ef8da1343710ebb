"""Covariance-matrix representation of Gaussian states.

Quadratures are ordered ``(x1, p1, x2, p2, ...)`` and the vacuum covariance
matrix is ``I / 2``. Symplectic matrices are plain ``numpy`` arrays; the
helpers below build them mode-by-mode and embed them into larger systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import GaussepError, UnphysicalError

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10


def omega(num_modes: int) -> np.ndarray:
    """Standard symplectic form for ``num_modes`` modes."""
    return np.kron(np.eye(num_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_square_even(mat: np.ndarray, name: str = "matrix") -> int:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
        raise GaussepError(f"{name} must be a square matrix of even size, got {mat.shape}")
    if mat.shape[0] == 0:
        raise GaussepError(f"{name} is empty")
    return mat.shape[0] // 2


def _check_symmetric(mat: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    scale = max(1.0, float(np.max(np.abs(mat))))
    if np.max(np.abs(mat - mat.T)) > tol * scale:
        raise GaussepError("covariance matrix is not symmetric")


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GaussianState:
    """A Gaussian state of ``num_modes`` modes.

    ``cov`` is symmetrised on construction and checked against the
    uncertainty relation. The mean is carried along for completeness but no
    entanglement routine looks at it.
    """

    cov: np.ndarray
    mean: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        m = _check_square_even(cov, "cov")
        _check_symmetric(cov)
        cov = (cov + cov.T) / 2
        if not is_physical(cov):
            raise UnphysicalError("covariance matrix violates the uncertainty relation")
        mean = np.zeros(2 * m) if self.mean is None else np.asarray(self.mean, dtype=float)
        if mean.shape != (2 * m,):
            raise GaussepError(f"mean must have length {2 * m}, got {mean.shape}")
        object.__setattr__(self, "cov", _frozen(cov))
        object.__setattr__(self, "mean", _frozen(mean))

    @property
    def num_modes(self) -> int:
        return self.cov.shape[0] // 2

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        """Marginal state on ``modes`` (in the order given)."""
        idx = _quadrature_indices(modes, self.num_modes)
        return GaussianState(self.cov[np.ix_(idx, idx)], self.mean[idx])

    def is_pure(self, tol: float = 1e-9) -> bool:
        nu = symplectic_eigenvalues(self.cov)
        return bool(np.all(np.abs(nu - 0.5) <= tol))


def _quadrature_indices(modes: Sequence[int], num_modes: int) -> list[int]:
    idx = []
    for k in modes:
        if not 0 <= k < num_modes:
            raise GaussepError(f"mode index {k} out of range for {num_modes} modes")
        idx.extend((2 * k, 2 * k + 1))
    if len(set(idx)) != len(idx):
        raise GaussepError(f"repeated mode indices {list(modes)}")
    return idx


def direct_sum(*states: GaussianState) -> GaussianState:
    """Tensor product of independent Gaussian states."""
    n = sum(2 * s.num_modes for s in states)
    cov = np.zeros((n, n))
    pos = 0
    for s in states:
        k = 2 * s.num_modes
        cov[pos : pos + k, pos : pos + k] = s.cov
        pos += k
    return GaussianState(cov, np.concatenate([s.mean for s in states]))


# ~~~~~~
# States
# ~~~~~~


def vacuum_state(num_modes: int) -> GaussianState:
    """Vacuum on ``num_modes`` modes, covariance ``I/2``."""
    if int(num_modes) != num_modes or num_modes < 1:
        raise GaussepError(f"number of modes must be a positive integer, got {num_modes}")
    return GaussianState(0.5 * np.eye(2 * int(num_modes)))


def thermal_state(nu: float) -> GaussianState:
    """Single-mode thermal state with covariance ``nu * I`` (``nu >= 1/2``)."""
    return GaussianState(nu * np.eye(2))


def two_mode_squeezed_vacuum(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing ``r >= 0``.

    Diagonal blocks are ``cosh(2r)/2 * I`` and the off-diagonal block is
    ``sinh(2r)/2 * diag(1, -1)``.
    """
    if not np.isfinite(r) or r < 0:
        raise GaussepError(f"squeezing must be a finite non-negative number, got {r}")
    return apply_symplectic(vacuum_state(2), two_mode_squeezer(r))


def random_passive(num_modes: int, rng: np.random.Generator, layers: int = 2) -> np.ndarray:
    """Random passive (photon-number preserving) symplectic from rotations and beamsplitters."""
    m = num_modes
    S = np.eye(2 * m)
    for _ in range(layers):
        for k in range(m):
            S = rotation(rng.uniform(0, 2 * np.pi), k, m) @ S
        for j in range(m):
            for k in range(j + 1, m):
                S = beamsplitter(rng.uniform(0, 1), (j, k), m) @ S
    for k in range(m):
        S = rotation(rng.uniform(0, 2 * np.pi), k, m) @ S
    return S


def random_pure_state(num_modes: int, seed: int | np.random.Generator | None = None, z_max: float = 2.0) -> GaussianState:
    """Random pure Gaussian state ``S S^T / 2``.

    ``S`` is a random passive transform after one layer of single-mode
    squeezers with ``|z| <= z_max``; every pure state has this form, so the
    sampler covers them all, though not uniformly. The same ``seed`` always
    gives the same matrix.
    """
    if not z_max >= 0:
        raise GaussepError(f"z_max must be non-negative, got {z_max}")
    m = int(num_modes)
    if m < 1:
        raise GaussepError("need at least one mode")
    rng = np.random.default_rng(seed)
    Sq = np.eye(2 * m)
    for k in range(m):
        Sq = squeezer(rng.uniform(-z_max, z_max), k, m) @ Sq
    S = random_passive(m, rng) @ Sq
    return GaussianState(0.5 * S @ S.T)


# ~~~~~~~~~~~
# Symplectics
# ~~~~~~~~~~~


def is_symplectic(S: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    m = _check_square_even(S, "symplectic matrix")
    Om = omega(m)
    return bool(np.linalg.norm(S @ Om @ S.T - Om) <= tol * max(1.0, np.linalg.norm(S) ** 2))


def embed(local: np.ndarray, modes: Sequence[int], num_modes: int) -> np.ndarray:
    """Embed a matrix acting on ``modes`` into an identity on ``num_modes``."""
    local = np.asarray(local, dtype=float)
    idx = _quadrature_indices(modes, num_modes)
    if local.shape != (len(idx), len(idx)):
        raise GaussepError(f"local matrix shape {local.shape} does not match modes {list(modes)}")
    S = np.eye(2 * num_modes)
    S[np.ix_(idx, idx)] = local
    return S


def rotation(theta: float, mode: int = 0, num_modes: int = 1) -> np.ndarray:
    """Phase rotation ``a -> exp(-i theta) a``; ``theta = pi/2`` maps ``x`` to ``p``."""
    c, s = np.cos(theta), np.sin(theta)
    return embed(np.array([[c, s], [-s, c]]), [mode], num_modes)


def squeezer(z: float, mode: int = 0, num_modes: int = 1) -> np.ndarray:
    """Single-mode squeezer ``diag(e^-z, e^z)``; ``z > 0`` squeezes ``x``."""
    return embed(np.diag([np.exp(-z), np.exp(z)]), [mode], num_modes)


def beamsplitter(l: float, modes: Sequence[int] = (0, 1), num_modes: int = 2) -> np.ndarray:
    """Beamsplitter with reflectivity ``l`` between ``modes = (a, e)``.

    Acts as ``a -> sqrt(1-l) a + sqrt(l) e`` and ``e -> sqrt(1-l) e - sqrt(l) a``
    on both quadratures. Tracing out ``e`` prepared in vacuum gives a loss
    channel with parameter ``l``.
    """
    if not 0.0 <= l <= 1.0:
        raise GaussepError(f"reflectivity must lie in [0, 1], got {l}")
    if len(modes) != 2:
        raise GaussepError("beamsplitter acts on exactly two modes")
    t, s = np.sqrt(1.0 - l), np.sqrt(l)
    I2 = np.eye(2)
    local = np.block([[t * I2, s * I2], [-s * I2, t * I2]])
    return embed(local, modes, num_modes)


def two_mode_squeezer(r: float, modes: Sequence[int] = (0, 1), num_modes: int = 2) -> np.ndarray:
    ch, sh = np.cosh(r), np.sinh(r)
    Z = np.diag([1.0, -1.0])
    local = np.block([[ch * np.eye(2), sh * Z], [sh * Z, ch * np.eye(2)]])
    return embed(local, modes, num_modes)


def apply_symplectic(state: GaussianState, S: np.ndarray) -> GaussianState:
    """Return ``S V S^T`` (and ``S @ mean``) for a Gaussian unitary ``S``."""
    S = np.asarray(S, dtype=float)
    if S.shape != state.cov.shape:
        raise GaussepError(f"symplectic of shape {S.shape} does not match {state.num_modes}-mode state")
    if not is_symplectic(S):
        raise GaussepError("matrix is not symplectic")
    return GaussianState(S @ state.cov @ S.T, S @ state.mean)


# ~~~~~~~
# Spectra
# ~~~~~~~


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Ascending symplectic eigenvalues of a positive-definite covariance matrix.

    Computed as the positive eigenvalues of the Hermitian matrix
    ``V^{1/2} (i Omega) V^{1/2}``, which share the spectrum of ``i Omega V``.
    """
    cov = np.asarray(cov, dtype=float)
    m = _check_square_even(cov, "cov")
    _check_symmetric(cov)
    cov = (cov + cov.T) / 2
    w, U = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise GaussepError("covariance matrix is not positive definite")
    root = (U * np.sqrt(w)) @ U.T
    herm = root @ (1j * omega(m)) @ root
    ev = np.linalg.eigvalsh((herm + herm.conj().T) / 2)
    return np.sort(ev[m:])


def spectral_tolerance(cov: np.ndarray, tol: float = PHYSICAL_TOL) -> float:
    """Tolerance on symplectic eigenvalues, widened for ill-conditioned ``cov``.

    Rounding in the entries of a squeezed covariance matrix moves its
    symplectic eigenvalues by roughly ``eps * cond(cov)``, which exceeds
    ``1e-10`` once the squeezing passes ``r ~ 4``.
    """
    w = np.linalg.eigvalsh((cov + cov.T) / 2)
    if w[0] <= 0:
        return tol
    return max(tol, 8 * np.finfo(float).eps * w[-1] / w[0])


def is_physical(cov: np.ndarray, tol: float = PHYSICAL_TOL) -> bool:
    """True if every symplectic eigenvalue is at least ``1/2 - tol``.

    ``tol`` is widened by :func:`spectral_tolerance` for badly conditioned input.
    """
    cov = np.asarray(cov, dtype=float)
    _check_square_even(cov, "cov")
    _check_symmetric(cov)
    if np.linalg.eigvalsh((cov + cov.T) / 2)[0] <= 0:
        return False
    return bool(symplectic_eigenvalues(cov)[0] >= 0.5 - spectral_tolerance(cov, tol))
