"""Local thermal noise acting identically and independently on every mode.

Each mode goes through the lossy thermal channel

    sigma(t) = e^{-gamma t} sigma0 + (1 - e^{-gamma t}) (2 n_bar + 1) I,

which is a semigroup in ``t`` with fixed point ``(2 n_bar + 1) I``. Times are
reported in units of ``1/gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import phase_space as ps
from .entanglement import log_negativity
from .errors import InvalidArgumentError, UnsupportedStateError
from .protocols import CLASSICAL_FIDELITY, GUARD_BAND, assisted_network_fidelity
from .states import StateSpec

CROSSING_TOL = 1e-6
DEFAULT_HORIZON = 20.0


@dataclass(frozen=True)
class BathParams:
    n_bar: float = 0.0
    gamma: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        if not self.n_bar >= 0:
            raise InvalidArgumentError("n_bar must be >= 0")
        if not self.gamma > 0:
            raise InvalidArgumentError("gamma must be > 0")
        if not self.t >= 0:
            raise InvalidArgumentError("t must be >= 0")

    def at(self, t: float) -> "BathParams":
        return replace(self, t=t)


def evolve_thermal(sigma0, bath: BathParams) -> np.ndarray:
    sigma0 = ps.require_physical(sigma0)
    decay = math.exp(-bath.gamma * bath.t)
    return decay * sigma0 + (1.0 - decay) * (2.0 * bath.n_bar + 1.0) * np.eye(len(sigma0))


def _symmetric_resource(spec: StateSpec) -> np.ndarray:
    if not getattr(spec, "fully_symmetric", False):
        raise UnsupportedStateError(f"family {spec.family!r} is not fully symmetric")
    return spec.covariance()


def fidelity_decay_curve(spec: StateSpec, bath: BathParams, t_grid) -> list[tuple[float, float]]:
    """Optimal network fidelity of the decohering resource at each time in ``t_grid``."""
    sigma0 = _symmetric_resource(spec)
    out = []
    for t in t_grid:
        sigma = evolve_thermal(sigma0, bath.at(float(t)))
        out.append((float(t), assisted_network_fidelity(sigma)))
    return out


def logneg_curve(spec: StateSpec, bath: BathParams, t_grid, partition: str = "1|23") -> list[tuple[float, float]]:
    sigma0 = spec.covariance()
    return [(float(t), log_negativity(evolve_thermal(sigma0, bath.at(float(t))), partition)) for t in t_grid]


def _first_crossing(f, horizon: float, step: float, tol: float):
    """First root of a non-increasing ``f`` on ``[0, horizon]`` (scan, then bisection)."""
    lo = 0.0
    if f(lo) <= 0:
        return 0.0
    x = step
    while x <= horizon + 1e-12:
        if f(x) <= 0:
            hi = x
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if f(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        lo = x
        x += step
    return None


def classical_crossing_time(spec: StateSpec, bath: BathParams, horizon: float = DEFAULT_HORIZON, step: float = 0.5):
    """Time at which the network fidelity drops to 1/2, or ``None`` within ``horizon`` (in ``gamma t``)."""
    sigma0 = _symmetric_resource(spec)

    def excess(gt):
        sigma = evolve_thermal(sigma0, bath.at(gt / bath.gamma))
        return assisted_network_fidelity(sigma) - CLASSICAL_FIDELITY - GUARD_BAND

    gt = _first_crossing(excess, horizon, step, CROSSING_TOL)
    return None if gt is None else gt / bath.gamma


def entanglement_vanishing_time(
    spec: StateSpec, bath: BathParams, partition: str = "1|23", horizon: float = DEFAULT_HORIZON, step: float = 0.25
):
    """Time at which the state becomes PPT across ``partition``, or ``None`` within ``horizon``.

    For fully symmetric states this is also where full inseparability, and
    with it the residual contangle, is lost.
    """
    sigma0 = spec.covariance()
    part = ps.ModePartition.parse(partition)

    def gap(gt):
        sigma = evolve_thermal(sigma0, bath.at(gt / bath.gamma))
        nu = ps.symplectic_eigenvalues(ps.partial_transpose(sigma, part.left))
        return float(1.0 - nu.min())

    gt = _first_crossing(gap, horizon, step, CROSSING_TOL)
    return None if gt is None else gt / bath.gamma
