"""Optical recipes for the three-mode state families.

Every family is produced by simulating its preparation network in phase
space: squeezed and/or thermal inputs, then beam splitters. Parametric
descriptions of the families are :class:`StateSpec` subclasses, which
serialize to a tagged JSON object.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import ClassVar

import numpy as np
from scipy.optimize import brentq

from . import phase_space as ps
from .entanglement import triangle_check
from .errors import InvalidArgumentError, NoSolutionError

TWO_THIRDS = 2.0 / 3.0


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def two_mode_squeezed(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum with ``m = cosh 2r`` on the diagonal."""
    if r < 0:
        raise InvalidArgumentError("squeezing r must be >= 0")
    m = math.cosh(2.0 * r)
    return _tms_from_m(m)


def _tms_from_m(m: float) -> np.ndarray:
    c = math.sqrt(max(m * m - 1.0, 0.0))
    return np.array(
        [
            [m, 0.0, c, 0.0],
            [0.0, m, 0.0, -c],
            [c, 0.0, m, 0.0],
            [0.0, -c, 0.0, m],
        ]
    )


def tritter() -> np.ndarray:
    """``B23(1/2) B12(1/3)``: the symmetrizing double beam splitter."""
    return ps.beam_splitter(2, 3, 0.5, 3) @ ps.beam_splitter(1, 2, 1.0 / 3.0, 3)


def allotment_matrix(s: float, t: float) -> np.ndarray:
    """``A123 = B23(2/3) B12(t) B13(s)`` in phase space."""
    return (
        ps.beam_splitter(2, 3, TWO_THIRDS, 3)
        @ ps.beam_splitter(1, 2, t, 3)
        @ ps.beam_splitter(1, 3, s, 3)
    )


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value}")


def allotment(m: float, s: float, t: float) -> np.ndarray:
    """Pure three-mode state: two-mode squeezing ``m`` on modes 1, 2 and vacuum on 3, allotted."""
    if not m >= 1.0:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    _check_unit("s", s)
    _check_unit("t", t)
    sigma_in = ps.tensor(_tms_from_m(m), ps.vacuum(1))
    return ps.apply_symplectic(sigma_in, allotment_matrix(s, t))


def allotment_m(a1, s, t):
    """Two-mode squeezing ``m`` that gives mode 1 the local mixedness ``a1`` after the allotment.

    Vectorized over numpy inputs. Returns ``nan`` where the discriminant is
    negative or the denominator ``(st + t - 1)^2`` vanishes.
    """
    a1, s, t = np.broadcast_arrays(np.asarray(a1, float), np.asarray(s, float), np.asarray(t, float))
    den = (s * t + t - 1.0) ** 2
    disc = a1**2 * den + 4.0 * s * (t - 1.0) * t * (2.0 * t - 1.0) * (2.0 * s * t - 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        m = (t * (t * (s - 1.0) ** 2 + s - 1.0) + np.sqrt(disc)) / den
    m = np.where((disc < 0) | (den == 0), np.nan, m)
    return m if m.ndim else float(m)


def _mixing_3x3(s, t):
    """Batched 3x3 mode-mixing matrices of the allotment (x and p sectors share them)."""
    s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
    shape = s.shape

    def bs(i, j, tau):
        M = np.zeros(shape + (3, 3))
        k = 3 - i - j
        c, d = np.sqrt(tau), np.sqrt(1.0 - tau)
        M[..., i, i], M[..., i, j] = c, d
        M[..., j, i], M[..., j, j] = d, -c
        M[..., k, k] = 1.0
        return M

    return bs(1, 2, np.full(shape, TWO_THIRDS)) @ bs(0, 1, t) @ bs(0, 2, s)


def allotment_local_mixednesses(m, s, t) -> np.ndarray:
    """Local mixednesses ``(a1, a2, a3)`` of allotment outputs, vectorized (last axis)."""
    m, s, t = np.broadcast_arrays(np.asarray(m, float), np.asarray(s, float), np.asarray(t, float))
    c = np.sqrt(np.maximum(m * m - 1.0, 0.0))
    X = np.zeros(m.shape + (3, 3))
    X[..., 0, 0] = X[..., 1, 1] = m
    X[..., 2, 2] = 1.0
    P = X.copy()
    X[..., 0, 1] = X[..., 1, 0] = c
    P[..., 0, 1] = P[..., 1, 0] = -c
    M = _mixing_3x3(s, t)
    Mt = np.swapaxes(M, -1, -2)
    vx = np.diagonal(M @ X @ Mt, axis1=-2, axis2=-1)
    vp = np.diagonal(M @ P @ Mt, axis1=-2, axis2=-1)
    return np.sqrt(vx * vp)


# ---------------------------------------------------------------------------
# allotment inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AllotmentSolution:
    m: float
    s: float
    t: float
    residual_error: float

    def covariance(self) -> np.ndarray:
        return allotment(self.m, self.s, self.t)


def _targets_residual(a1, a2, a3, s, t):
    m = allotment_m(a1, s, t)
    a = allotment_local_mixednesses(m, s, t)
    bad = ~np.isfinite(m) | (m < 1.0)
    res = np.stack([a[..., 1] - a2, a[..., 2] - a3], axis=-1)
    res = np.where(bad[..., None], np.inf, res)
    return m, res


def _newton(a1, a2, a3, x0, tol, max_iter):
    """Damped Newton on ``(s, t) -> (a2(s,t) - a2*, a3(s,t) - a3*)`` inside the unit box."""
    def f(x):
        return _targets_residual(a1, a2, a3, x[0], x[1])[1]

    x = np.array(x0, float)
    fx = f(x)
    norm = float(np.max(np.abs(fx)))
    h = 1e-7
    for _ in range(max_iter):
        if norm < tol:
            break
        J = np.empty((2, 2))
        for k in range(2):
            lo, hi = x.copy(), x.copy()
            lo[k] = max(0.0, x[k] - h)
            hi[k] = min(1.0, x[k] + h)
            with np.errstate(invalid="ignore"):
                J[:, k] = (f(hi) - f(lo)) / (hi[k] - lo[k])
        if not np.all(np.isfinite(J)):
            break
        step = np.linalg.lstsq(J, -fx, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            trial = np.clip(x + lam * step, 0.0, 1.0)
            ft = f(trial)
            nt = float(np.max(np.abs(ft)))
            if nt < norm:
                x, fx, norm = trial, ft, nt
                break
            lam *= 0.5
        else:
            break
    return x, norm


def solve_allotment_params(
    a1: float, a2: float, a3: float, *, tol: float = 1e-8, max_iter: int = 100, accept: float = 1e-6
) -> AllotmentSolution:
    """Find ``(m, s, t)`` whose allotment output has local mixednesses ``(a1, a2, a3)``.

    ``m`` follows from ``a1`` in closed form for every ``(s, t)``; the remaining
    2x2 system is seeded from a 64x64 scan of the unit square and polished by
    damped Newton iterations. Raises :class:`NoSolutionError` (carrying the
    best point) when no seed reaches ``accept``.
    """
    if not triangle_check(a1, a2, a3):
        raise InvalidArgumentError(f"({a1}, {a2}, {a3}) violates the triangle inequality")
    if max(abs(a1 - 1.0), abs(a2 - 1.0), abs(a3 - 1.0)) < 1e-12:
        return AllotmentSolution(1.0, 0.5, 0.5, 0.0)

    grid = np.linspace(0.0, 1.0, 64)
    S, T = np.meshgrid(grid, grid, indexing="ij")
    _, res = _targets_residual(a1, a2, a3, S, T)
    score = np.max(np.abs(res), axis=-1).ravel()
    order = np.argsort(score)

    best = (np.inf, None)
    for idx in order[:12]:
        if not np.isfinite(score[idx]):
            break
        x, norm = _newton(a1, a2, a3, (S.ravel()[idx], T.ravel()[idx]), tol, max_iter)
        if norm < best[0]:
            best = (norm, x)
        if norm < tol:
            break

    norm, x = best
    if x is None or norm > accept:
        raise NoSolutionError(
            f"allotment parameters for ({a1}, {a2}, {a3}) not found (best residual {norm:.3g})",
            best=None if x is None else tuple(x),
            residual=norm,
        )
    s, t = float(x[0]), float(x[1])
    m = float(allotment_m(a1, s, t))
    return AllotmentSolution(m, s, t, norm)


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------


@dataclass
class PureSample:
    """Allotment outputs with random transmittivities at fixed ``a1``."""

    a1: float
    a2: np.ndarray
    a3: np.ndarray
    s: np.ndarray
    t: np.ndarray
    m: np.ndarray
    rejected: int = 0

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.a2.tolist(), self.a3.tolist()))

    def __len__(self) -> int:
        return len(self.a2)

    CSV_HEADER: ClassVar[str] = "a1,a2,a3,s,t,m"

    def csv_rows(self, fmt: str = ".12g"):
        for row in zip(self.a2, self.a3, self.s, self.t, self.m):
            yield ",".join(format(float(v), fmt) for v in (self.a1, *row))


DENOMINATOR_CUTOFF = 1e-6


def random_pure_sample(a1: float, count: int, seed: int, batch: int = 4096) -> PureSample:
    """Sample ``count`` pure states with local mixedness ``a1`` on mode 1.

    Transmittivities are uniform on ``[0, 1]`` from ``numpy``'s PCG64 stream
    seeded by ``seed``; ``m`` comes from :func:`allotment_m`. Draws with
    ``|st + t - 1| < 1e-6``, an infeasible square root, or ``m < 1`` are
    rejected and counted.
    """
    if not a1 >= 1.0:
        raise InvalidArgumentError("a1 must be >= 1")
    if count < 1:
        raise InvalidArgumentError("count must be >= 1")
    rng = np.random.default_rng(seed)
    kept = {k: [] for k in ("s", "t", "m")}
    have, rejected = 0, 0
    while have < count:
        s = rng.random(batch)
        t = rng.random(batch)
        m = allotment_m(a1, s, t)
        ok = (np.abs(s * t + t - 1.0) >= DENOMINATOR_CUTOFF) & np.isfinite(m) & (m >= 1.0)
        take = np.flatnonzero(ok)[: count - have]
        # rejections are counted only up to the last accepted draw
        last = take[-1] + 1 if len(take) else batch
        rejected += int(np.count_nonzero(~ok[:last]))
        for k, v in (("s", s), ("t", t), ("m", m)):
            kept[k].append(v[take])
        have += len(take)
    s, t, m = (np.concatenate(kept[k]) for k in ("s", "t", "m"))
    a = allotment_local_mixednesses(m, s, t)
    return PureSample(a1=float(a1), a2=a[:, 1], a3=a[:, 2], s=s, t=t, m=m, rejected=rejected)


# ---------------------------------------------------------------------------
# state families
# ---------------------------------------------------------------------------


def _inputs(*singles) -> np.ndarray:
    return ps.tensor(*singles)


def _squeezed(r: float, scale: float = 1.0) -> np.ndarray:
    """``scale * diag(e^{2r}, e^{-2r})``: a (thermal-)squeezed single mode."""
    return scale * np.diag([math.exp(2.0 * r), math.exp(-2.0 * r)])


def ghzw(r1: float, r2: float) -> np.ndarray:
    """Pure GHZ/W state: a p-squeezed mode (``r1``) and two x-squeezed modes (``r2``) through a tritter."""
    sigma_in = _inputs(_squeezed(r1), _squeezed(-r2), _squeezed(-r2))
    return ps.apply_symplectic(sigma_in, tritter())


def ghzw_local_mixedness(r1: float, r2: float) -> float:
    return math.sqrt(4.0 * math.cosh(2.0 * (r1 + r2)) + 5.0) / 3.0


def ghzw_squeezing_for(a: float) -> float:
    """Equal input squeezing ``r`` giving a GHZ/W state of local mixedness ``a``."""
    if not a >= 1.0:
        raise InvalidArgumentError("local mixedness must be >= 1")
    return math.acosh((9.0 * a * a - 5.0) / 4.0) / 4.0


def noisy_ghzw(n: float, r: float) -> np.ndarray:
    """Tritter applied to three squeezed thermal inputs (noise ``n``, squeezing ``r``)."""
    if not n >= 1.0:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if not r >= 0.0:
        raise InvalidArgumentError(f"r must be >= 0, got {r}")
    sigma_in = _inputs(_squeezed(r, n), _squeezed(-r, n), _squeezed(-r, n))
    return ps.apply_symplectic(sigma_in, tritter())


def t_state_noise(r: float) -> float:
    """Thermal parameter ``n(r) = sqrt(3 + e^{-4r}) - e^{-2r}`` of the T-state inputs."""
    return math.sqrt(3.0 + math.exp(-4.0 * r)) - math.exp(-2.0 * r)


def t_state(r: float) -> np.ndarray:
    if r < 0:
        raise InvalidArgumentError("squeezing r must be >= 0")
    nr = t_state_noise(r)
    sigma_in = _inputs(_squeezed(r), nr * np.eye(2), nr * np.eye(2))
    return ps.apply_symplectic(sigma_in, tritter())


def t_state_local_mixedness(r: float) -> float:
    e2, e4 = math.exp(-2.0 * r), math.exp(-4.0 * r)
    return math.sqrt(2.0 * e2 * math.sqrt(3.0 + e4) * (math.exp(4.0 * r) - 3.0) + 6.0 * e4 + 11.0) / 3.0


def t_state_squeezing_for(a: float) -> float:
    if not a >= 1.0:
        raise InvalidArgumentError("local mixedness must be >= 1")
    if a == 1.0:
        return 0.0
    hi = 1.0
    while t_state_local_mixedness(hi) < a:
        hi *= 2.0
    return brentq(lambda r: t_state_local_mixedness(r) - a, 0.0, hi, xtol=1e-14)


def basset_hound(a: float) -> np.ndarray:
    """Two-mode squeezed modes 1, 2 (``a = cosh 2r``) with mode 2 split 50:50 against vacuum mode 3."""
    if not a >= 1.0:
        raise InvalidArgumentError(f"a must be >= 1, got {a}")
    sigma_in = ps.tensor(_tms_from_m(a), ps.vacuum(1))
    return ps.apply_symplectic(sigma_in, ps.beam_splitter(2, 3, 0.5, 3))


# ---------------------------------------------------------------------------
# parametric descriptions
# ---------------------------------------------------------------------------


_REGISTRY: dict[str, type] = {}


def _register(cls):
    _REGISTRY[cls.family] = cls
    return cls


@dataclass(frozen=True)
class StateSpec:
    """Base class of the family descriptions; ``family`` is the JSON tag."""

    family: ClassVar[str] = ""
    fully_symmetric: ClassVar[bool] = False
    pure: ClassVar[bool] = True

    def covariance(self) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"family": self.family, **asdict(self)}


def spec_from_dict(data: dict) -> StateSpec:
    data = dict(data)
    try:
        cls = _REGISTRY[data.pop("family")]
    except KeyError:
        raise InvalidArgumentError(f"unknown or missing state family in {data!r}") from None
    return cls(**{k: float(v) for k, v in data.items()})


@_register
@dataclass(frozen=True)
class TwoModeSqueezed(StateSpec):
    r: float
    family: ClassVar[str] = "two-mode-squeezed"

    def covariance(self):
        return two_mode_squeezed(self.r)


@_register
@dataclass(frozen=True)
class GHZW(StateSpec):
    r1: float
    r2: float
    family: ClassVar[str] = "ghzw"
    fully_symmetric: ClassVar[bool] = True

    @classmethod
    def from_local_mixedness(cls, a: float) -> "GHZW":
        r = ghzw_squeezing_for(a)
        return cls(r, r)

    @property
    def a(self) -> float:
        return ghzw_local_mixedness(self.r1, self.r2)

    def covariance(self):
        return ghzw(self.r1, self.r2)


@_register
@dataclass(frozen=True)
class NoisyGHZW(StateSpec):
    n: float
    r: float
    family: ClassVar[str] = "noisy-ghzw"
    fully_symmetric: ClassVar[bool] = True
    pure: ClassVar[bool] = False

    def __post_init__(self):
        if not self.n >= 1.0:
            raise InvalidArgumentError(f"n must be >= 1, got {self.n}")
        if not self.r >= 0.0:
            raise InvalidArgumentError(f"r must be >= 0, got {self.r}")

    @classmethod
    def from_s(cls, n: float, s: float) -> "NoisyGHZW":
        if not s >= 1.0:
            raise InvalidArgumentError("s = e^{2r} must be >= 1")
        return cls(n, 0.5 * math.log(s))

    @classmethod
    def from_db(cls, n_db: float, s_db: float) -> "NoisyGHZW":
        """Both parameters given as ``10 log10`` of ``n`` and of ``s``."""
        return cls.from_s(ps.from_decibels(n_db), ps.from_decibels(s_db))

    @property
    def s(self) -> float:
        return math.exp(2.0 * self.r)

    @property
    def a(self) -> float:
        s = self.s
        return self.n * math.sqrt(2.0 * s**4 + 5.0 * s**2 + 2.0) / (3.0 * s)

    def covariance(self):
        return noisy_ghzw(self.n, self.r)


@_register
@dataclass(frozen=True)
class TState(StateSpec):
    r: float
    family: ClassVar[str] = "t-state"
    fully_symmetric: ClassVar[bool] = True
    pure: ClassVar[bool] = False

    @classmethod
    def from_local_mixedness(cls, a: float) -> "TState":
        return cls(t_state_squeezing_for(a))

    @property
    def a(self) -> float:
        return t_state_local_mixedness(self.r)

    def covariance(self):
        return t_state(self.r)


@_register
@dataclass(frozen=True)
class BassetHound(StateSpec):
    a: float
    family: ClassVar[str] = "basset-hound"

    def __post_init__(self):
        if not self.a >= 1.0:
            raise InvalidArgumentError(f"a must be >= 1, got {self.a}")

    def covariance(self):
        return basset_hound(self.a)


@_register
@dataclass(frozen=True)
class ArbitraryPure(StateSpec):
    a1: float
    a2: float
    a3: float
    family: ClassVar[str] = "arbitrary-pure"

    def __post_init__(self):
        if not triangle_check(self.a1, self.a2, self.a3):
            raise InvalidArgumentError("local mixednesses violate the triangle inequality")

    def solve(self) -> AllotmentSolution:
        return solve_allotment_params(self.a1, self.a2, self.a3)

    def covariance(self):
        return self.solve().covariance()


@_register
@dataclass(frozen=True)
class AllotmentRaw(StateSpec):
    m: float
    s: float
    t: float
    family: ClassVar[str] = "allotment"

    def __post_init__(self):
        if not self.m >= 1.0:
            raise InvalidArgumentError("m must be >= 1")
        _check_unit("s", self.s)
        _check_unit("t", self.t)

    def covariance(self):
        return allotment(self.m, self.s, self.t)
