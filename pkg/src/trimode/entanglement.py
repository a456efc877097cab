"""Bipartite and tripartite entanglement of three-mode Gaussian states.

Contangles here are *Gaussian* contangles. They are evaluated numerically
only where they reduce to a squared logarithmic negativity (pure
bipartitions, two-mode states with equal local mixednesses, and bisymmetric
blocks after unitary localization). The remaining cases are covered by
closed forms for the state families that have one.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import phase_space as ps
from .errors import InvalidArgumentError, InvalidStateError, UnsupportedStateError

BELOW_ONE_TOL = 1e-10
SYMMETRY_TOL = 1e-8


def arcsinh_sq(x: float) -> float:
    """``arcsinh(x)**2`` written as ``ln(x + sqrt(x^2 + 1))**2``."""
    return math.log(x + math.sqrt(x * x + 1.0)) ** 2


# ---------------------------------------------------------------------------
# logarithmic negativity
# ---------------------------------------------------------------------------


def _as_partition(partition) -> ps.ModePartition:
    if isinstance(partition, ps.ModePartition):
        return partition
    if isinstance(partition, str):
        return ps.ModePartition.parse(partition)
    left, right = partition
    return ps.ModePartition(left, right)


def log_negativity(sigma, partition) -> float:
    """Logarithmic negativity across ``partition``, which must cover every mode.

    Eigenvalues of the partially transposed matrix in ``[1 - 1e-10, 1]`` count
    as 1, so round-off never produces spurious entanglement.
    """
    sigma = ps.as_covariance(sigma)
    part = _as_partition(partition)
    n = ps.n_modes_of(sigma)
    if part.modes != frozenset(range(1, n + 1)):
        raise InvalidArgumentError(f"partition {part} does not cover the {n} modes of sigma")
    nu = ps.symplectic_eigenvalues(ps.partial_transpose(sigma, part.left))
    below = nu[nu < 1.0 - BELOW_ONE_TOL]
    return max(0.0, float(-np.sum(np.log(below))))


def _restrict(sigma, part: ps.ModePartition):
    """Reduce ``sigma`` to the modes of ``part`` and relabel them 1..k."""
    kept = sorted(part.modes)
    relabel = {m: i + 1 for i, m in enumerate(kept)}
    local = ps.ModePartition([relabel[m] for m in part.left], [relabel[m] for m in part.right])
    return ps.reduce(sigma, kept), local


def reduced_log_negativity(sigma, partition) -> float:
    """Like :func:`log_negativity` but first discards modes outside the partition."""
    part = _as_partition(partition)
    red, local = _restrict(sigma, part)
    return log_negativity(red, local)


def is_ppt(sigma, partition) -> bool:
    return reduced_log_negativity(sigma, partition) == 0.0


def triangle_check(a1: float, a2: float, a3: float, tol: float = 1e-9) -> bool:
    """``|a_i - a_j| + 1 <= a_k <= a_i + a_j - 1`` for every ordering."""
    a = (a1, a2, a3)
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        if abs(a[i] - a[j]) + 1.0 > a[k] + tol or a[k] > a[i] + a[j] - 1.0 + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# contangles
# ---------------------------------------------------------------------------


def contangle_pure_bipartition(sigma, partition) -> float:
    """Squared logarithmic negativity of a pure state across ``partition``."""
    sigma = ps.as_covariance(sigma)
    if not ps.is_pure(sigma):
        raise InvalidStateError("contangle_pure_bipartition needs a pure state (det sigma = 1)")
    return log_negativity(sigma, partition) ** 2


def _equal_local_invariants(two_mode: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    da = np.linalg.det(two_mode[:2, :2])
    db = np.linalg.det(two_mode[2:, 2:])
    return abs(da - db) <= tol * max(1.0, abs(da), abs(db))


def contangle_symmetric_two_mode(sigma) -> float:
    """Gaussian contangle of a symmetric two-mode state, i.e. its squared log-negativity.

    "Symmetric" means equal local invariants ``det sigma_1 = det sigma_2``,
    which covers literal swap symmetry and every state locally equivalent to it.
    """
    sigma = ps.as_covariance(sigma)
    if ps.n_modes_of(sigma) != 2:
        raise InvalidArgumentError("expected a two-mode covariance matrix")
    if not _equal_local_invariants(sigma):
        raise UnsupportedStateError(
            "two-mode state is not symmetric; its Gaussian contangle has no closed form here"
        )
    return log_negativity(sigma, "1|2") ** 2


def swap_modes(sigma, j: int, k: int) -> np.ndarray:
    sigma = ps.as_covariance(sigma)
    n = ps.n_modes_of(sigma)
    order = list(range(1, n + 1))
    order[j - 1], order[k - 1] = order[k - 1], order[j - 1]
    idx = []
    for m in order:
        idx.extend((2 * m - 2, 2 * m - 1))
    return sigma[np.ix_(idx, idx)]


def is_bisymmetric(sigma, j: int, k: int, tol: float = SYMMETRY_TOL) -> bool:
    """Invariance under exchange of modes ``j`` and ``k``."""
    sigma = ps.as_covariance(sigma)
    diff = np.max(np.abs(swap_modes(sigma, j, k) - sigma))
    return bool(diff <= tol * ps._scale(sigma))


def is_fully_symmetric(sigma, tol: float = SYMMETRY_TOL) -> bool:
    sigma = ps.as_covariance(sigma)
    n = ps.n_modes_of(sigma)
    return all(is_bisymmetric(sigma, j, k, tol) for j, k in itertools.combinations(range(1, n + 1), 2))


def _others(probe: int) -> tuple[int, int]:
    if probe not in (1, 2, 3):
        raise InvalidArgumentError(f"probe mode must be 1, 2 or 3, got {probe}")
    j, k = (m for m in (1, 2, 3) if m != probe)
    return j, k


def unitary_localization(sigma, probe: int):
    """Concentrate the ``probe | (j k)`` entanglement of a bisymmetric state in two modes.

    A 50:50 beam splitter on the swap-symmetric pair ``(j, k)`` decouples the
    second output ``k'``. Returns ``(two_mode, decoupled)``: the covariance
    matrix of ``(probe, j')`` in that order and the single-mode block of ``k'``.
    """
    sigma = ps.as_covariance(sigma)
    if ps.n_modes_of(sigma) != 3:
        raise InvalidArgumentError("unitary localization is implemented for three modes")
    j, k = _others(probe)
    if not is_bisymmetric(sigma, j, k):
        raise UnsupportedStateError(f"state is not symmetric under exchange of modes {j} and {k}")
    out = ps.apply_symplectic(sigma, ps.beam_splitter(j, k, 0.5, 3))
    kq = [2 * k - 2, 2 * k - 1]
    rest = [i for i in range(6) if i not in kq]
    cross = np.max(np.abs(out[np.ix_(rest, kq)]))
    if cross > SYMMETRY_TOL * ps._scale(out):
        raise UnsupportedStateError(f"localized mode {k} did not decouple (cross-correlation {cross:.2e})")
    return _reorder_pair(out, probe, j), out[np.ix_(kq, kq)]


def _reorder_pair(sigma, first: int, second: int) -> np.ndarray:
    idx = [2 * first - 2, 2 * first - 1, 2 * second - 2, 2 * second - 1]
    return sigma[np.ix_(idx, idx)]


def one_vs_two_contangle(sigma, probe: int) -> float:
    """Gaussian contangle ``G(probe | jk)`` of a pure or ``jk``-bisymmetric state."""
    sigma = ps.as_covariance(sigma)
    j, k = _others(probe)
    part = ps.ModePartition([probe], [j, k])
    if ps.is_pure(sigma):
        return contangle_pure_bipartition(sigma, part)
    two_mode, _ = unitary_localization(sigma, probe)
    return contangle_symmetric_two_mode(two_mode)


def residual_terms(sigma, probe: int) -> float:
    """``G(i|jk) - G(i|j) - G(i|k)`` for one probe; raises when a term has no closed form."""
    j, k = _others(probe)
    whole = one_vs_two_contangle(sigma, probe)
    pair_j = contangle_symmetric_two_mode(ps.reduce(sigma, (probe, j)))
    pair_k = contangle_symmetric_two_mode(ps.reduce(sigma, (probe, k)))
    return whole - pair_j - pair_k


def residual_gaussian_contangle(sigma) -> float:
    """Minimum residual Gaussian contangle over the probes that can be evaluated.

    Pure states with symmetric reductions and noisy GHZ/W states qualify. Mixed
    states whose localized pair is not symmetric (the T states, for one) do
    not. Raises :class:`UnsupportedStateError` when no probe has all three
    terms available.
    """
    sigma = ps.as_covariance(sigma)
    if ps.n_modes_of(sigma) != 3:
        raise InvalidArgumentError("residual contangle is defined for three modes")
    values = []
    for probe in (1, 2, 3):
        try:
            values.append(residual_terms(sigma, probe))
        except UnsupportedStateError:
            continue
    if not values:
        raise UnsupportedStateError("no probe mode admits a closed-form residual contangle")
    return min(values)


# ---------------------------------------------------------------------------
# closed forms for the state families
# ---------------------------------------------------------------------------


def _require_a(a: float) -> None:
    if not a >= 1.0:
        raise InvalidArgumentError(f"local mixedness must be >= 1, got {a}")


def ghzw_reduced_contangle(a: float) -> float:
    """Two-mode Gaussian contangle ``G(i|j)`` of a pure GHZ/W state of local mixedness ``a``.

    The log argument ``(3a^2 - 1 - sqrt(9a^4 - 10a^2 + 1)) / 2`` is evaluated as
    ``2a^2 / (3a^2 - 1 + sqrt(...))`` to survive large ``a``.
    """
    _require_a(a)
    a2 = a * a
    arg = 2.0 * a2 / (3.0 * a2 - 1.0 + math.sqrt(9.0 * a2 * a2 - 10.0 * a2 + 1.0))
    return 0.25 * math.log(arg) ** 2


def ghzw_one_vs_two_contangle(a: float) -> float:
    _require_a(a)
    return arcsinh_sq(math.sqrt(a * a - 1.0))


def residual_contangle_ghzw(a: float) -> float:
    """Residual Gaussian contangle of a pure GHZ/W state."""
    return ghzw_one_vs_two_contangle(a) - 2.0 * ghzw_reduced_contangle(a)


def noisy_ghzw_local_mixedness(n: float, s: float) -> float:
    return n * math.sqrt(2.0 * s**4 + 5.0 * s**2 + 2.0) / (3.0 * s)


def _require_noisy_pair(n: float, s: float) -> None:
    if not n >= 1.0:
        raise InvalidArgumentError(f"thermal noise parameter n must be >= 1, got {n}")
    # the class boundaries assume squeezing r >= 0, i.e. s = e^{2r} >= 1
    if not s >= 1.0:
        raise InvalidArgumentError(f"squeezing parameter s must be >= 1, got {s}")


def class1_threshold(n: float) -> float:
    """Squeezing above which a noisy GHZ/W state is fully inseparable."""
    n2 = n * n
    inner = 9 * n2 * n2 - 2 * n2 + 9 + 3 * (n2 - 1) * math.sqrt(9 * n2 * n2 + 14 * n2 + 9)
    return math.sqrt(inner) / (4.0 * n)


def promiscuity_threshold(n: float) -> float:
    """Squeezing above which the two-mode reductions are entangled (``inf`` for ``n >= sqrt 3``)."""
    if n >= math.sqrt(3.0):
        return math.inf
    return math.sqrt(2.0) * n / math.sqrt(3.0 - n * n)


def noisy_ghzw_one_vs_two_contangle(n: float, s: float) -> float:
    """``G(1|23)`` of a noisy GHZ/W state in the fully inseparable region."""
    s2 = s * s
    big = 4 * s2 * s2 + s2 + 4
    root = 2 * (s2 - 1) * math.sqrt(4 * s2 * s2 + 10 * s2 + 4)
    if s2 >= 1.0:
        inner = 81.0 * s2 * s2 / (big + root)
    else:
        inner = big - root
    return 0.25 * math.log(n * n * inner / (9.0 * s2)) ** 2


def noisy_ghzw_reduced_contangle(n: float, s: float) -> float:
    """``G(1|2)`` of a noisy GHZ/W state (zero outside the promiscuous region)."""
    return max(0.0, -math.log(n * math.sqrt(s * s + 2.0) / (math.sqrt(3.0) * s))) ** 2


def residual_contangle_noisy_ghzw(n: float, s: float) -> float:
    """Residual Gaussian contangle of a noisy GHZ/W state; zero unless fully inseparable."""
    _require_noisy_pair(n, s)
    if not s > class1_threshold(n):
        return 0.0
    return noisy_ghzw_one_vs_two_contangle(n, s) - 2.0 * noisy_ghzw_reduced_contangle(n, s)


def basset_one_vs_two_contangle(a: float) -> float:
    """``G(3|12)`` of a basset hound state."""
    _require_a(a)
    return arcsinh_sq(0.5 * math.sqrt((a - 1.0) * (a + 3.0)))


def basset_reduced_contangle(a: float) -> float:
    """``G(1|2) = G(1|3)`` of a basset hound state (the 2|3 reduction is separable)."""
    _require_a(a)
    # sqrt((3a+1)^2/(a+3)^2 - 1) rewritten without cancellation
    return arcsinh_sq(2.0 * math.sqrt(2.0) * math.sqrt(a * a - 1.0) / (a + 3.0))


def residual_contangle_basset(a: float) -> float:
    """Residual Gaussian contangle of a basset hound state (probe mode 3)."""
    return basset_one_vs_two_contangle(a) - basset_reduced_contangle(a)


def basset_probe_residuals(a: float) -> dict[int, float]:
    """Residual for each probe choice; probes 2 and 3 coincide by bisymmetry."""
    probe1 = ghzw_one_vs_two_contangle(a) - 2.0 * basset_reduced_contangle(a)
    probe3 = residual_contangle_basset(a)
    return {1: probe1, 2: probe3, 3: probe3}


# ---------------------------------------------------------------------------
# separability of noisy GHZ/W states
# ---------------------------------------------------------------------------


class SeparabilityClass(enum.Enum):
    FULLY_INSEPARABLE = "FullyInseparable_Class1"
    BOUND_BISEPARABLE = "BoundBiseparable_Class4"
    FULLY_SEPARABLE = "FullySeparable_Class5"

    def __str__(self) -> str:
        return self.value


def classify_noisy_ghzw(n: float, s: float) -> SeparabilityClass:
    _require_noisy_pair(n, s)
    if s > class1_threshold(n):
        return SeparabilityClass.FULLY_INSEPARABLE
    if s > n:
        return SeparabilityClass.BOUND_BISEPARABLE
    return SeparabilityClass.FULLY_SEPARABLE


def promiscuity_predicate(n: float, s: float) -> bool:
    """Whether a noisy GHZ/W state also has entangled two-mode reductions."""
    _require_noisy_pair(n, s)
    return n < math.sqrt(3.0) and s > promiscuity_threshold(n)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


THREE_MODE_PARTITIONS = ("1|23", "2|13", "3|12", "1|2", "1|3", "2|3")


@dataclass
class EntanglementReport:
    logneg: dict[str, float]
    contangle: dict[str, float] = field(default_factory=dict)
    residual_gaussian_contangle: float | None = None
    family: str | None = None
    separability_class: SeparabilityClass | None = None

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "logneg": dict(self.logneg),
            "contangle": dict(self.contangle),
            "residual_gaussian_contangle": self.residual_gaussian_contangle,
            "separability_class": None if self.separability_class is None else self.separability_class.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EntanglementReport":
        sep = data.get("separability_class")
        return cls(
            logneg={k: float(v) for k, v in data["logneg"].items()},
            contangle={k: float(v) for k, v in data.get("contangle", {}).items()},
            residual_gaussian_contangle=data.get("residual_gaussian_contangle"),
            family=data.get("family"),
            separability_class=None if sep is None else SeparabilityClass(sep),
        )


def _numeric_contangle(sigma, part: ps.ModePartition) -> float | None:
    try:
        if len(part.modes) == 3:
            probe = next(iter(part.left if len(part.left) == 1 else part.right))
            return one_vs_two_contangle(sigma, probe)
        red, _ = _restrict(sigma, part)
        return contangle_symmetric_two_mode(red)
    except UnsupportedStateError:
        return None


def analyze(sigma, spec=None) -> EntanglementReport:
    """Entanglement report of a three-mode state.

    ``spec`` (a :class:`trimode.states.StateSpec`) is optional; when given it
    labels the report and lets the family's closed forms fill contangles that
    have no numerical route (nonsymmetric mixed reductions).
    """
    sigma = ps.require_physical(sigma)
    if ps.n_modes_of(sigma) != 3:
        raise InvalidArgumentError("analyze() expects a three-mode state")
    logneg = {p: reduced_log_negativity(sigma, p) for p in THREE_MODE_PARTITIONS}
    contangle = {}
    for p in THREE_MODE_PARTITIONS:
        value = _numeric_contangle(sigma, ps.ModePartition.parse(p))
        if value is not None:
            contangle[p] = value

    report = EntanglementReport(logneg=logneg, contangle=contangle)
    family = getattr(spec, "family", None)
    report.family = family

    if family == "basset-hound":
        pair = basset_reduced_contangle(spec.a)
        contangle.update({"1|2": pair, "1|3": pair, "2|3": 0.0})
        report.residual_gaussian_contangle = min(basset_probe_residuals(spec.a).values())
    else:
        try:
            report.residual_gaussian_contangle = max(0.0, residual_gaussian_contangle(sigma))
        except UnsupportedStateError:
            report.residual_gaussian_contangle = None

    if family == "noisy-ghzw":
        report.separability_class = classify_noisy_ghzw(spec.n, spec.s)
    return report
