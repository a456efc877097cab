"""Teleportation, teleportation-network and telecloning fidelities.

All fidelities refer to coherent-state inputs (``sigma_in = I``) unless an
explicit input covariance is passed. Fidelity thresholds are compared with
a strict inequality after a ``1e-12`` guard band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect, brentq, minimize

from . import phase_space as ps
from .entanglement import is_fully_symmetric, residual_contangle_ghzw, triangle_check
from .errors import InvalidArgumentError, NumericalDomainError, UnsupportedStateError

CLASSICAL_FIDELITY = 0.5
NO_CLONING_FIDELITY = 2.0 / 3.0
GUARD_BAND = 1e-12
SQUEEZE_BOUND = 3.0
XI = np.diag([-1.0, 1.0])


def classical_threshold() -> float:
    """Best fidelity for coherent-state transmission without entanglement."""
    return CLASSICAL_FIDELITY


def no_cloning_threshold() -> float:
    """Optimal Gaussian 1 -> 2 cloning fidelity."""
    return NO_CLONING_FIDELITY


def beats(fidelity: float, threshold: float) -> bool:
    return fidelity > threshold + GUARD_BAND


# ---------------------------------------------------------------------------
# two-party teleportation
# ---------------------------------------------------------------------------


def _teleport_matrix(sigma_ab: np.ndarray, sigma_in: np.ndarray) -> np.ndarray:
    sa, sb, e = sigma_ab[:2, :2], sigma_ab[2:, 2:], sigma_ab[:2, 2:]
    return 2.0 * sigma_in + XI @ sa @ XI + sb + XI @ e + e.T @ XI


def teleport_fidelity(sigma_ab, sigma_in=None, *, validate: bool = True) -> float:
    """Fidelity ``2/sqrt(det Sigma)`` of teleporting through the two-mode resource ``sigma_ab``.

    Mode 1 of ``sigma_ab`` is the sender's, mode 2 the receiver's.
    """
    sigma_ab = ps.as_covariance(sigma_ab)
    if sigma_ab.shape != (4, 4):
        raise InvalidArgumentError("teleportation resource must be a two-mode covariance matrix")
    sigma_in = np.eye(2) if sigma_in is None else ps.as_covariance(sigma_in)
    if sigma_in.shape != (2, 2):
        raise InvalidArgumentError("input state must be single-mode")
    if validate:
        ps.require_physical(sigma_ab)
        ps.require_physical(sigma_in)
    d = float(np.linalg.det(_teleport_matrix(sigma_ab, sigma_in)))
    if not d > 0:
        raise NumericalDomainError(f"det Sigma = {d} is not positive")
    return 2.0 / math.sqrt(d)


def _fidelity_grid(sigma_ab: np.ndarray, u, v, sigma_in=None) -> np.ndarray:
    """Fidelity after local squeezings ``diag(e^u, e^-u)`` (sender) and ``diag(e^v, e^-v)`` (receiver).

    ``u`` and ``v`` broadcast against each other.
    """
    sin = np.eye(2) if sigma_in is None else sigma_in
    a, b, e = sigma_ab[:2, :2], sigma_ab[2:, 2:], sigma_ab[:2, 2:]
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    s11 = 2 * sin[0, 0] + a[0, 0] * np.exp(2 * u) + b[0, 0] * np.exp(2 * v) - 2 * e[0, 0] * np.exp(u + v)
    s22 = 2 * sin[1, 1] + a[1, 1] * np.exp(-2 * u) + b[1, 1] * np.exp(-2 * v) + 2 * e[1, 1] * np.exp(-u - v)
    s12 = 2 * sin[0, 1] - a[0, 1] + b[0, 1] - e[0, 1] * np.exp(u - v) + e[1, 0] * np.exp(v - u)
    det = s11 * s22 - s12 * s12
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(det > 0, 2.0 / np.sqrt(det), 0.0)


def _polish(objective, starts, bound=SQUEEZE_BOUND):
    best_x, best_f = None, np.inf
    for x0 in starts:
        res = minimize(
            objective, x0, method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-14, "maxiter": 4000},
        )
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    return best_x, best_f


@dataclass
class LocalOptimum:
    """Best fidelity found and the local symplectic ``S_a (+) S_b`` that reaches it."""

    fidelity: float
    u: float
    v: float
    transform: np.ndarray = field(default_factory=lambda: np.eye(4), repr=False)


def _squeezing_search(sigma_ab, sin, step):
    grid = np.arange(-SQUEEZE_BOUND, SQUEEZE_BOUND + step / 2, step)
    F = _fidelity_grid(sigma_ab, grid[:, None], grid[None, :], sin)
    idx = np.argsort(F.ravel())[::-1][:3]
    starts = [np.array([grid[i // len(grid)], grid[i % len(grid)]]) for i in idx]

    def obj(x):
        x = np.clip(x, -SQUEEZE_BOUND, SQUEEZE_BOUND)
        return -float(_fidelity_grid(sigma_ab, x[0], x[1], sin))

    x, f = _polish(obj, starts)
    x = np.clip(x, -SQUEEZE_BOUND, SQUEEZE_BOUND)
    return float(-f), float(x[0]), float(x[1])


def _squeezers(u, v):
    return ps.local_symplectic([ps.squeezer(1, u, 1), ps.squeezer(1, v, 1)])


def optimize_local_squeezing(sigma_ab, sigma_in=None, *, step: float = 0.1) -> LocalOptimum:
    """Maximize the teleportation fidelity over local squeezings ``diag(e^u, e^-u)``, ``u, v`` in ``[-3, 3]``.

    A grid scan seeds a Nelder-Mead refinement. The squeezings act in the
    frame of ``sigma_ab`` as given (no rotations).
    """
    sigma_ab = ps.require_physical(sigma_ab)
    sin = None if sigma_in is None else ps.as_covariance(sigma_in)
    F, u, v = _squeezing_search(sigma_ab, sin, step)
    return LocalOptimum(F, u, v, _squeezers(u, v))


def _single_mode_symplectic(alpha, u, beta):
    return ps.phase_rotation(1, alpha, 1) @ ps.squeezer(1, u, 1) @ ps.phase_rotation(1, beta, 1)


def optimize_local_symplectic(sigma_ab, sigma_in=None, *, step: float = 0.1) -> LocalOptimum:
    """Maximize the teleportation fidelity over arbitrary local single-mode symplectics.

    The resource is first brought to its standard form, where local squeezings
    are searched as in :func:`optimize_local_squeezing`; a final Nelder-Mead
    pass over the full ``R(alpha) S(u) R(beta)`` parametrization of each side
    confirms or improves the result.
    """
    sigma_ab = ps.require_physical(sigma_ab)
    sin = np.eye(2) if sigma_in is None else ps.as_covariance(sigma_in)
    to_std = ps.standard_form_map(sigma_ab)
    std = ps.apply_symplectic(sigma_ab, to_std)
    F0, u0, v0 = _squeezing_search(std, sin, step)

    def obj(x):
        S = ps.local_symplectic([_single_mode_symplectic(*x[:3]), _single_mode_symplectic(*x[3:])])
        d = np.linalg.det(_teleport_matrix(ps.apply_symplectic(std, S), sin))
        return -2.0 / math.sqrt(d) if d > 0 else 0.0

    x, f = _polish(obj, [np.array([0.0, u0, 0.0, 0.0, v0, 0.0])])
    if -f > F0:
        S = ps.local_symplectic([_single_mode_symplectic(*x[:3]), _single_mode_symplectic(*x[3:])])
        F, u, v = float(-f), float(x[1]), float(x[4])
    else:
        S, F, u, v = _squeezers(u0, v0), F0, u0, v0
    return LocalOptimum(F, u, v, S @ to_std)


# ---------------------------------------------------------------------------
# entanglement of teleportation
# ---------------------------------------------------------------------------


def entanglement_of_teleportation(fidelity: float, n_parties: int = 3) -> float:
    """Normalized excess of the optimal fidelity over the classical bound, clipped at 0."""
    if not 0.0 < fidelity <= 1.0 + 1e-12:
        raise InvalidArgumentError("fidelity must lie in (0, 1]")
    if n_parties < 2:
        raise InvalidArgumentError("at least two parties are needed")
    return max(0.0, (fidelity - CLASSICAL_FIDELITY) / (1.0 - CLASSICAL_FIDELITY))


def gres_from_et(e_t: float) -> float:
    """Residual contangle of the GHZ/W state whose optimal network has entanglement of teleportation ``e_t``.

    The first logarithm is evaluated in a rationalized form,
    ``(1 - E) sqrt(E^2 + 4E + 1) / (2 sqrt(2) E + (E + 1) sqrt(E^2 + 1))``,
    which avoids the cancellation of the plain ratio near ``E -> 1``.
    """
    if not 0.0 <= e_t < 1.0:
        raise InvalidArgumentError("E_T must lie in [0, 1)")
    E = float(e_t)
    q = E * (E + 4.0) + 1.0
    first = (1.0 - E) * math.sqrt(q) / (2.0 * math.sqrt(2.0) * E + (E + 1.0) * math.sqrt(E * E + 1.0))
    return math.log(first) ** 2 - 0.5 * math.log((E * E + 1.0) / q) ** 2


ET_UPPER = 1.0 - 1e-12


def et_from_gres(g: float) -> float:
    """Inverse of :func:`gres_from_et` by bisection on ``[0, 1 - 1e-12]``."""
    if not g >= 0:
        raise InvalidArgumentError("residual contangle must be >= 0")
    if g == 0:
        return 0.0
    top = gres_from_et(ET_UPPER)
    if g >= top:
        return ET_UPPER
    return bisect(lambda e: gres_from_et(e) - g, 0.0, ET_UPPER, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def ghzw_network_fidelity(a: float) -> float:
    """Optimal three-party network fidelity of a GHZ/W resource with local mixedness ``a``."""
    return 0.5 * (1.0 + et_from_gres(residual_contangle_ghzw(a)))


def f2_reduced_optimal(r_bar: float) -> float:
    """Best two-party fidelity using only the reduced two-mode GHZ/W state (helper traced out)."""
    if r_bar < 0:
        raise InvalidArgumentError("r_bar must be >= 0")
    return 3.0 / (3.0 + math.sqrt(3.0 + 6.0 * math.exp(-4.0 * r_bar)))


def f2_unitary_localized_optimal(r_bar: float) -> float:
    """Two-party fidelity after localizing all GHZ/W entanglement onto one pair by a beam splitter."""
    if r_bar < 0:
        raise InvalidArgumentError("r_bar must be >= 0")
    c = math.cosh(4.0 * r_bar)
    return 1.0 / ((math.sqrt(4.0 * c + 5.0) - 2.0 * math.sqrt(c - 1.0)) / 3.0 + 1.0)


# ---------------------------------------------------------------------------
# assisted three-party network
# ---------------------------------------------------------------------------


@dataclass
class NetworkOptimum:
    fidelity: float
    angle: float
    u: float
    v: float


def _network_search(sigma: np.ndarray, sender: int, receiver: int, n_angles: int = 64, step: float = 0.1) -> NetworkOptimum:
    helper = ({1, 2, 3} - {sender, receiver}).pop()
    # keep (sender, receiver) order in the conditioned two-mode matrix
    order = [0, 1] if sender < receiver else [1, 0]

    def conditioned(theta):
        c = ps.condition_on_homodyne(sigma, helper, theta)
        idx = [2 * order[0], 2 * order[0] + 1, 2 * order[1], 2 * order[1] + 1]
        return c[np.ix_(idx, idx)]

    grid = np.arange(-SQUEEZE_BOUND, SQUEEZE_BOUND + step / 2, step)
    angles = np.linspace(0.0, math.pi, n_angles, endpoint=False)
    cands = []
    for th in angles:
        F = _fidelity_grid(conditioned(th), grid[:, None], grid[None, :])
        k = int(np.argmax(F))
        cands.append((float(F.ravel()[k]), th, grid[k // len(grid)], grid[k % len(grid)]))
    cands.sort(reverse=True)

    def obj(x):
        th, u, v = x
        return -float(_fidelity_grid(conditioned(th), np.clip(u, -3, 3), np.clip(v, -3, 3)))

    x, f = _polish(obj, [np.array(c[1:]) for c in cands[:3]])
    return NetworkOptimum(float(-f), float(x[0] % math.pi), float(np.clip(x[1], -3, 3)), float(np.clip(x[2], -3, 3)))


def assisted_network_fidelity(sigma, sender: int = 1, receiver: int = 2, *, details: bool = False):
    """Teleportation fidelity between two parties assisted by a homodyne measurement of the third.

    The helper's quadrature angle and local squeezings of sender and receiver
    are optimized numerically. Only fully symmetric three-mode resources are
    accepted.
    """
    sigma = ps.require_physical(sigma)
    if ps.n_modes_of(sigma) != 3:
        raise InvalidArgumentError("the network resource must have three modes")
    if sender == receiver or {sender, receiver} - {1, 2, 3}:
        raise InvalidArgumentError("sender and receiver must be two distinct modes among 1, 2, 3")
    if not is_fully_symmetric(sigma):
        raise UnsupportedStateError("assisted network fidelity is only defined here for fully symmetric resources")
    opt = _network_search(sigma, sender, receiver)
    return opt if details else opt.fidelity


# ---------------------------------------------------------------------------
# telecloning
# ---------------------------------------------------------------------------


def telecloning_symmetric_fidelity(a: float) -> float:
    """Fidelity of both clones in 1 -> 2 telecloning through a basset hound state."""
    if not a >= 1.0:
        raise InvalidArgumentError("a must be >= 1")
    return 4.0 / (3.0 * a - 2.0 * math.sqrt(2.0) * math.sqrt(a * a - 1.0) + 5.0)


def _asym_bob(a1: float, a2: float, a3: float) -> float:
    rad = ((a1 + a2 - a3) ** 2 - 1.0) * ((a1 + a2 + a3) ** 2 - 1.0) / (a1 * a2)
    q = (
        -2.0 * a3 * a3 + 2.0 * a1 * a2 + 4.0 * (a1 + a2) + 3.0 * (a1 * a1 + a2 * a2)
        - (a1 + a2 + 2.0) * math.sqrt(max(rad, 0.0)) + 2.0
    )
    if not q > 0:
        raise NumericalDomainError(f"non-positive fidelity denominator {q}")
    return 2.0 / math.sqrt(q)


def telecloning_asymmetric_fidelities(a1: float, a2: float, a3: float) -> tuple[float, float]:
    """``(F_bob, F_claire)`` for telecloning from mode 1 to modes 2 and 3 of a pure state."""
    if not triangle_check(a1, a2, a3):
        raise InvalidArgumentError("local mixednesses violate the triangle inequality")
    return _asym_bob(a1, a2, a3), _asym_bob(a1, a3, a2)


def _optimal_bob(a: float, t: float) -> float:
    q = (
        (a + 3.0) ** 2 + (a - 1.0) ** 2 * t * t + 2.0 * (a - 1.0) * (3.0 * a + 5.0) * t
        - 4.0 * math.sqrt((a * a - 1.0) * t) * (a + (a - 1.0) * t + 3.0)
    )
    return 2.0 / math.sqrt(q)


def optimal_asymmetric_family(a: float, t: float) -> tuple[float, float]:
    """Clone fidelities of the optimal asymmetric resources ``a2 = 1 + (a-1) t``, ``a3 = a - a2 + 1``."""
    if not a >= 1.0:
        raise InvalidArgumentError("a must be >= 1")
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError("t must lie in [0, 1]")
    return _optimal_bob(a, t), _optimal_bob(a, 1.0 - t)


def _bob_interval(a: float) -> tuple[float, float]:
    # F_bob >= 2/3  <=>  (a-1) u^2 - 2 sqrt(a^2-1) u + a <= 0,  u = sqrt(t)
    c, d = math.sqrt(a * a - 1.0), math.sqrt(a - 1.0)
    return ((c - d) / (a - 1.0)) ** 2, ((c + d) / (a - 1.0)) ** 2


def _claire_interval(a: float) -> tuple[float, float]:
    # F_claire >= 1/2  <=>  (a-1) v^2 - 2 sqrt(a^2-1) v + (a-1) <= 0,  v = sqrt(1-t)
    c, d = math.sqrt(a * a - 1.0), math.sqrt(2.0 * (a - 1.0))
    v_lo, v_hi = (c - d) / (a - 1.0), (c + d) / (a - 1.0)
    return 1.0 - v_hi * v_hi, 1.0 - v_lo * v_lo


def asymmetric_feasibility(a: float):
    """Range of ``t`` where Bob beats the cloning bound while Claire beats the classical one.

    Returns ``(t_lo, t_hi)`` or ``None`` when the range is empty.
    """
    if not a > 1.0:
        raise InvalidArgumentError("a must be > 1")
    b_lo, b_hi = _bob_interval(a)
    c_lo, c_hi = _claire_interval(a)
    lo, hi = max(b_lo, c_lo, 0.0), min(b_hi, c_hi, 1.0)
    return (lo, hi) if lo <= hi else None


def t_range_lower(a: float) -> float:
    return (a - 2.0 * math.sqrt(a + 1.0) + 2.0) / (a - 1.0)


def t_range_upper(a: float) -> float:
    return 2.0 * (math.sqrt(2.0) * math.sqrt(a + 1.0) - 2.0) / (a - 1.0)


@dataclass(frozen=True)
class TelecloningWindow:
    """Resource local mixednesses that admit asymmetric telecloning with Bob above 2/3 and Claire above 1/2."""

    a_min: float
    a_max: float

    def contains(self, a: float) -> bool:
        return self.a_min <= a <= self.a_max

    @staticmethod
    def t_min(a: float) -> float:
        return t_range_lower(a)

    @staticmethod
    def t_max(a: float) -> float:
        return t_range_upper(a)


def telecloning_window() -> TelecloningWindow:
    """Locate the window by solving ``t_min(a) = t_max(a)`` on either side of ``a = 3``."""
    gap = lambda a: t_range_upper(a) - t_range_lower(a)  # noqa: E731
    lo = brentq(gap, 1.0 + 1e-9, 3.0, xtol=1e-14, rtol=1e-15)
    hi = brentq(gap, 3.0, 100.0, xtol=1e-14, rtol=1e-15)
    return TelecloningWindow(lo, hi)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class FidelityReport:
    fidelity: float
    sender: int
    receivers: list[int]
    resource: str = ""
    beats_classical: bool = field(init=False)
    beats_no_cloning: bool = field(init=False)

    def __post_init__(self):
        self.beats_classical = beats(self.fidelity, CLASSICAL_FIDELITY)
        self.beats_no_cloning = beats(self.fidelity, NO_CLONING_FIDELITY)

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "sender": self.sender,
            "receivers": list(self.receivers),
            "beats_classical": self.beats_classical,
            "beats_no_cloning": self.beats_no_cloning,
            "resource": self.resource,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FidelityReport":
        return cls(float(data["fidelity"]), int(data["sender"]), [int(r) for r in data["receivers"]], data.get("resource", ""))
