"""Covariance matrices, symplectic algebra and Gaussian measurement updates.

Conventions used throughout the package:

* quadratures are ordered ``(x1, p1, x2, p2, ..., xN, pN)``;
* the vacuum covariance matrix is the identity (``[X_i, X_j] = 2i Omega_ij``);
* modes are labelled ``1..N`` in every public function, as in the physics
  literature, and converted to 0-based indices internally.

Covariance matrices and symplectic matrices are plain ``numpy`` arrays. No
function mutates its arguments.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidArgumentError, InvalidStateError, NumericalDomainError

TOL_SYM = 1e-10
# default physicality tolerance; the environment may override it at import time
TOL_PHYS = float(os.environ.get("TRIMODE_TOL_PHYS", "1e-9"))
PAIRING_TOL = 1e-8
PINV_RCOND = 1e-10

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------


def n_modes_of(sigma) -> int:
    """Number of modes of a ``2N x 2N`` matrix."""
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise InvalidArgumentError(f"expected a 2N x 2N matrix, got shape {sigma.shape}")
    if sigma.shape[0] == 0:
        raise InvalidArgumentError("empty matrix")
    return sigma.shape[0] // 2


def _scale(sigma: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(sigma))))


def is_symmetric(sigma, tol: float = TOL_SYM) -> bool:
    sigma = np.asarray(sigma, dtype=float)
    return bool(np.max(np.abs(sigma - sigma.T)) <= tol * _scale(sigma))


def as_covariance(sigma, *, tol_sym: float = TOL_SYM, symmetrize: bool = True) -> np.ndarray:
    """Validate shape and symmetry of ``sigma`` and return it as a float array.

    The symmetry tolerance is relative to ``max(1, max|sigma_ij|)`` so that
    heavily squeezed states survive round-off from ``S sigma S^T`` products.
    When ``symmetrize`` is true the (already nearly symmetric) input is
    replaced by ``(sigma + sigma^T) / 2``.
    """
    arr = np.array(sigma, dtype=float)
    n_modes_of(arr)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("covariance matrix has non-finite entries")
    if not is_symmetric(arr, tol_sym):
        raise InvalidArgumentError("covariance matrix is not symmetric")
    if symmetrize:
        arr = 0.5 * (arr + arr.T)
    return arr


def _mode_index(mode: int, n_modes: int) -> int:
    if isinstance(mode, bool) or not isinstance(mode, (int, np.integer)):
        raise InvalidArgumentError(f"mode labels must be integers, got {mode!r}")
    if not 1 <= mode <= n_modes:
        raise InvalidArgumentError(f"mode {mode} out of range 1..{n_modes}")
    return int(mode) - 1


def _mode_indices(modes: Iterable[int], n_modes: int) -> list[int]:
    labels = sorted(set(modes))
    if not labels:
        raise InvalidArgumentError("empty mode set")
    return [_mode_index(m, n_modes) for m in labels]


def quadrature_indices(modes: Iterable[int], n_modes: int) -> list[int]:
    """Row/column indices of the quadratures of the given (1-based) modes."""
    out = []
    for k in _mode_indices(modes, n_modes):
        out.extend((2 * k, 2 * k + 1))
    return out


def block(sigma, i: int, j: int | None = None) -> np.ndarray:
    """The 2x2 block ``sigma_i`` (or ``epsilon_ij`` when ``j`` is given)."""
    sigma = np.asarray(sigma)
    n = n_modes_of(sigma)
    a = _mode_index(i, n)
    b = a if j is None else _mode_index(j, n)
    return sigma[2 * a : 2 * a + 2, 2 * b : 2 * b + 2].copy()


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModePartition:
    """A bipartition ``left | right`` of (a subset of) the modes.

    Rendered as ``"1|23"``; :meth:`parse` accepts the same syntax
    (parentheses and commas are ignored, so ``"1|(2,3)"`` also works).
    """

    left: frozenset
    right: frozenset

    def __init__(self, left: Iterable[int], right: Iterable[int]):
        left, right = frozenset(int(m) for m in left), frozenset(int(m) for m in right)
        if not left or not right:
            raise InvalidArgumentError("both sides of a partition must be non-empty")
        if left & right:
            raise InvalidArgumentError(f"partition sides overlap: {sorted(left & right)}")
        if min(left | right) < 1:
            raise InvalidArgumentError("mode labels start at 1")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def parse(cls, text: str) -> "ModePartition":
        try:
            lhs, rhs = text.split("|")
        except ValueError:
            raise InvalidArgumentError(f"cannot parse partition {text!r}") from None

        def digits(side):
            side = side.replace("(", "").replace(")", "").replace(",", "").replace(" ", "")
            if not side.isdigit():
                raise InvalidArgumentError(f"cannot parse partition {text!r}")
            return [int(c) for c in side]

        return cls(digits(lhs), digits(rhs))

    @property
    def modes(self) -> frozenset:
        return self.left | self.right

    def __str__(self) -> str:
        return "".join(map(str, sorted(self.left))) + "|" + "".join(map(str, sorted(self.right)))


# ---------------------------------------------------------------------------
# symplectic algebra
# ---------------------------------------------------------------------------


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ``Omega = omega (+) ... (+) omega`` with ``omega = [[0, 1], [-1, 0]]``."""
    if isinstance(n_modes, bool) or not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise InvalidArgumentError(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes)), OMEGA_1)


def is_symplectic(S, tol: float = 1e-10) -> bool:
    S = np.asarray(S, dtype=float)
    omega = symplectic_form(n_modes_of(S))
    return bool(np.max(np.abs(S @ omega @ S.T - omega)) < tol)


def beam_splitter(i: int, j: int, tau: float, n_modes: int) -> np.ndarray:
    """Phase-space matrix of a beam splitter of transmittivity ``tau`` on modes ``i, j``.

    On the pair ``(x_i, p_i, x_j, p_j)`` it acts as::

        [[ sqrt(tau), 0, sqrt(1-tau), 0],
         [ 0, sqrt(tau), 0, sqrt(1-tau)],
         [ sqrt(1-tau), 0, -sqrt(tau), 0],
         [ 0, sqrt(1-tau), 0, -sqrt(tau)]]

    so the second output port picks up a sign flip. ``tau = cos(theta)**2``
    for a rotation by ``theta`` in phase space.
    """
    a, b = _mode_index(i, n_modes), _mode_index(j, n_modes)
    if a == b:
        raise InvalidArgumentError("beam splitter needs two distinct modes")
    if not 0.0 <= tau <= 1.0:
        raise InvalidArgumentError(f"transmittivity must lie in [0, 1], got {tau}")
    c, s = math.sqrt(tau), math.sqrt(1.0 - tau)
    S = np.eye(2 * n_modes)
    for q in range(2):
        ia, ib = 2 * a + q, 2 * b + q
        S[ia, ia], S[ia, ib] = c, s
        S[ib, ia], S[ib, ib] = s, -c
    return S


def squeezer(mode: int, r: float, n_modes: int) -> np.ndarray:
    """``diag(e^r, e^-r)`` on ``mode``: ``x -> e^r x``, ``p -> e^-r p``."""
    k = _mode_index(mode, n_modes)
    S = np.eye(2 * n_modes)
    S[2 * k, 2 * k] = math.exp(r)
    S[2 * k + 1, 2 * k + 1] = math.exp(-r)
    return S


def phase_rotation(mode: int, phi: float, n_modes: int) -> np.ndarray:
    """Phase shifter rotating ``(x, p)`` of ``mode`` by the angle ``phi``."""
    k = _mode_index(mode, n_modes)
    S = np.eye(2 * n_modes)
    c, s = math.cos(phi), math.sin(phi)
    S[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = [[c, s], [-s, c]]
    return S


def apply_symplectic(sigma, S) -> np.ndarray:
    """``S sigma S^T``."""
    sigma = as_covariance(sigma)
    S = np.asarray(S, dtype=float)
    if S.shape != sigma.shape:
        raise InvalidArgumentError(f"dimension mismatch: S is {S.shape}, sigma is {sigma.shape}")
    out = S @ sigma @ S.T
    return 0.5 * (out + out.T)


def tensor(*sigmas) -> np.ndarray:
    """Direct sum of independent subsystems; modes of later factors are shifted up."""
    if not sigmas:
        raise InvalidArgumentError("tensor() needs at least one covariance matrix")
    return block_diag(*[as_covariance(s) for s in sigmas])


def reduce(sigma, keep: Iterable[int]) -> np.ndarray:
    """Principal submatrix of the kept modes, in ascending mode order."""
    sigma = as_covariance(sigma)
    idx = quadrature_indices(keep, n_modes_of(sigma))
    return sigma[np.ix_(idx, idx)]


def partial_transpose(sigma, transposed_modes: Iterable[int]) -> np.ndarray:
    """Flip the sign of the momentum of every transposed mode (``Lambda sigma Lambda``).

    The result need not be a physical covariance matrix.
    """
    sigma = as_covariance(sigma)
    n = n_modes_of(sigma)
    flip = np.ones(2 * n)
    for k in _mode_indices(transposed_modes, n):
        flip[2 * k + 1] = -1.0
    return flip[:, None] * sigma * flip[None, :]


# ---------------------------------------------------------------------------
# spectra and physicality
# ---------------------------------------------------------------------------


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic spectrum of a positive definite ``sigma``, sorted ascending.

    The eigenvalues of ``Omega sigma`` come in pairs ``+-i nu``; their moduli
    are sorted and each consecutive pair is checked to agree before one value
    per pair is kept.
    """
    sigma = as_covariance(sigma)
    n = n_modes_of(sigma)
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NumericalDomainError("symplectic spectrum needs a positive definite matrix") from None
    mags = np.sort(np.abs(np.linalg.eigvals(symplectic_form(n) @ sigma)))
    lo, hi = mags[0::2], mags[1::2]
    if np.any(np.abs(hi - lo) > PAIRING_TOL * np.maximum(1.0, hi)):
        raise NumericalDomainError("eigenvalues of Omega sigma did not pair up")
    return 0.5 * (lo + hi)


def check_physical(sigma, tol_phys: float = TOL_PHYS) -> bool:
    """Robertson-Schroedinger test ``sigma + i Omega >= 0`` (up to ``-tol_phys``)."""
    sigma = as_covariance(sigma)
    omega = symplectic_form(n_modes_of(sigma))
    return bool(np.linalg.eigvalsh(sigma + 1j * omega)[0] >= -tol_phys)


def require_physical(sigma, tol_phys: float = TOL_PHYS) -> np.ndarray:
    sigma = as_covariance(sigma)
    if not check_physical(sigma, tol_phys):
        raise InvalidStateError("covariance matrix violates the uncertainty relation")
    return sigma


def purity(sigma, tol_phys: float = TOL_PHYS) -> float:
    """``1 / sqrt(det sigma)``."""
    sigma = as_covariance(sigma)
    det = float(np.linalg.det(sigma))
    if det < 1.0 - tol_phys:
        raise InvalidStateError(f"det sigma = {det:.6g} < 1: not a physical state")
    return 1.0 / math.sqrt(det)


def is_pure(sigma, tol: float = 1e-8) -> bool:
    return abs(float(np.linalg.det(as_covariance(sigma))) - 1.0) <= tol


def local_mixedness(sigma, mode: int) -> float:
    """``a_j = sqrt(det sigma_j)`` of the single-mode block of ``mode``."""
    det = float(np.linalg.det(block(as_covariance(sigma), mode)))
    if det <= 0:
        raise InvalidStateError(f"mode {mode} has a non-positive block determinant")
    return math.sqrt(det)


def local_mixednesses(sigma) -> np.ndarray:
    sigma = as_covariance(sigma)
    return np.array([local_mixedness(sigma, k) for k in range(1, n_modes_of(sigma) + 1)])


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------


def condition_on_homodyne(sigma, measured_mode: int, quadrature_angle: float) -> np.ndarray:
    """Covariance matrix of the other modes after homodyning ``measured_mode``.

    The measured quadrature is ``cos(angle) x + sin(angle) p``. The update is
    the Schur complement ``sigma_A - sigma_AB (Pi sigma_B Pi)^+ sigma_AB^T`` with
    ``Pi`` the projector on the measured direction; it does not depend on the
    measurement outcome.
    """
    sigma = as_covariance(sigma)
    n = n_modes_of(sigma)
    if n < 2:
        raise InvalidArgumentError("homodyne conditioning needs at least two modes")
    k = _mode_index(measured_mode, n)
    meas = [2 * k, 2 * k + 1]
    rest = [i for i in range(2 * n) if i not in meas]
    A = sigma[np.ix_(rest, rest)]
    B = sigma[np.ix_(meas, meas)]
    C = sigma[np.ix_(rest, meas)]
    u = np.array([math.cos(quadrature_angle), math.sin(quadrature_angle)])
    proj = np.outer(u, u)
    out = A - C @ np.linalg.pinv(proj @ B @ proj, rcond=PINV_RCOND) @ C.T
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# units and serialization
# ---------------------------------------------------------------------------


def to_decibels(value: float) -> float:
    """``10 log10(value)``."""
    if not value > 0:
        raise InvalidArgumentError(f"decibels need a positive value, got {value}")
    return 10.0 * math.log10(value)


def from_decibels(db: float) -> float:
    return 10.0 ** (db / 10.0)


def covariance_to_dict(sigma) -> dict:
    """``{"n_modes": N, "entries": [...]}`` with exactly symmetric row-major entries."""
    sigma = as_covariance(sigma)
    return {"n_modes": n_modes_of(sigma), "entries": [float(x) for x in sigma.ravel()]}


def covariance_from_dict(data: dict, *, validate_physical: bool = True) -> np.ndarray:
    try:
        n = int(data["n_modes"])
        entries = np.asarray(data["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed covariance matrix record: {exc}") from None
    if n < 1 or entries.size != 4 * n * n:
        raise InvalidArgumentError(f"expected {4 * n * n} entries for {n} modes, got {entries.size}")
    sigma = as_covariance(entries.reshape(2 * n, 2 * n))
    if validate_physical:
        require_physical(sigma)
    return sigma


def vacuum(n_modes: int = 1) -> np.ndarray:
    return np.eye(2 * n_modes)


def thermal(n_bar: float) -> np.ndarray:
    """Single-mode thermal state ``(2 n_bar + 1) I``."""
    if n_bar < 0:
        raise InvalidArgumentError("mean photon number must be non-negative")
    return (2.0 * n_bar + 1.0) * np.eye(2)


def local_symplectic(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Direct sum of single-mode 2x2 symplectic matrices."""
    return block_diag(*[np.asarray(b, dtype=float) for b in blocks])


def _normalizer(block2: np.ndarray) -> np.ndarray:
    """Symplectic ``sqrt(a) block^{-1/2}`` sending a single-mode block to ``a I``."""
    w, V = np.linalg.eigh(block2)
    a = math.sqrt(w[0] * w[1])
    return math.sqrt(a) * (V @ np.diag(w**-0.5) @ V.T)


def standard_form_map(sigma) -> np.ndarray:
    """Local symplectic ``L = L_1 (+) L_2`` bringing a two-mode state to its standard form.

    After the map, ``sigma_1 = a I``, ``sigma_2 = b I`` and
    ``eps_12 = diag(c_plus, c_minus)`` with ``c_plus >= |c_minus|`` and
    ``c_plus >= 0``.
    """
    sigma = as_covariance(sigma)
    if sigma.shape != (4, 4):
        raise InvalidArgumentError("standard form is implemented for two modes")
    L = local_symplectic([_normalizer(sigma[:2, :2]), _normalizer(sigma[2:, 2:])])
    s = apply_symplectic(sigma, L)
    U, _, Vt = np.linalg.svd(s[:2, 2:])
    flip = np.diag([1.0, -1.0])
    if np.linalg.det(U) < 0:
        U = U @ flip
    if np.linalg.det(Vt) < 0:
        Vt = flip @ Vt
    return local_symplectic([U.T, Vt]) @ L


def two_mode_standard_form(sigma) -> np.ndarray:
    """Covariance matrix of a two-mode state in standard form (see :func:`standard_form_map`)."""
    return apply_symplectic(sigma, standard_form_map(sigma))
