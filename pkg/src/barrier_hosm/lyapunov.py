"""Hong's Lyapunov function, the shrinking envelope and the barrier gain.

The gain ``phi_hat`` runs a two-phase latch: it ramps with time until the
Lyapunov value first drops to half the envelope, then follows the barrier
``F_eta(V) = eta / (eta - V)`` for the rest of the run.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .controllers import GainFunctionSpec, HongParams, _vchain
from .errors import ContractViolation, DomainError, ParameterError
from .homogeneity import _spow, check_state


def _lyap(z, gains, betas, rec_exps):
    v = _vchain(z, gains, betas, rec_exps)
    total = 0.0
    for zi, vi, b in zip(z, v, betas):
        total += (abs(zi) ** (b + 1.0) + b * abs(vi) ** (b + 1.0)) / (b + 1.0) - zi * _spow(vi, b)
    return total


def lyapunov_V(params: HongParams, z: Sequence[float]) -> float:
    """Closed-form value of Hong's Lyapunov function.

    Each term is the integral of ``sgp(s, b) - sgp(v, b)`` from the virtual
    control ``v_{i-1}`` to ``z_i``, evaluated analytically.
    """
    z = check_state(z, params.r)
    p = params.profile
    return _lyap(z, params.gains, p.betas, p.rec_exps)


def lyapunov_V_quad(params: HongParams, z: Sequence[float], tol: float = 1e-10) -> float:
    """Same quantity as :func:`lyapunov_V`, by adaptive quadrature of each term.

    Kept independent of the closed form; used as a verification oracle.
    """
    z = check_state(z, params.r)
    p = params.profile
    v = _vchain(z, params.gains, p.betas, p.rec_exps)
    total = 0.0
    for zi, vi, b in zip(z, v, p.betas):
        offset = _spow(vi, b)
        lo, hi = sorted((vi, zi))
        if lo == hi:
            continue
        # the integrand has a cusp at s = 0 when b < 1
        points = [0.0] if lo < 0.0 < hi else None
        val, _ = integrate.quad(
            lambda s: _spow(s, b) - offset, lo, hi,
            points=points, epsabs=0.0, epsrel=tol, limit=200,
        )
        total += val if zi >= vi else -val
    return total


def grad_V(params: HongParams, z: Sequence[float]) -> np.ndarray:
    """Central finite-difference gradient of :func:`lyapunov_V`.

    Step per component is ``max(1e-7, 1e-7 * |z_i|)``. Diagnostics only.
    """
    z = check_state(z, params.r)
    if not any(z):
        raise DomainError("grad_V is undefined at the origin")
    p = params.profile
    args = (params.gains, p.betas, p.rec_exps)
    grad = np.empty(len(z))
    for i, zi in enumerate(z):
        h = max(1e-7, 1e-7 * abs(zi))
        zp = list(z)
        zm = list(z)
        zp[i] = zi + h
        zm[i] = zi - h
        grad[i] = (_lyap(zp, *args) - _lyap(zm, *args)) / ((zi + h) - (zi - h))
    return grad


class RampKind(enum.Enum):
    IDENTITY = "Identity"
    POWER_LAW = "PowerLaw"


@dataclass(frozen=True)
class GainSchedule:
    """Envelope ``eta(t) = epsilon * exp(-M t)`` and barrier-gain settings."""

    epsilon: float = 1.0
    M: float = 0.2
    k: float = 1.0
    g: GainFunctionSpec = field(default_factory=GainFunctionSpec)
    ramp_kind: RampKind = RampKind.IDENTITY
    ramp_exponent: float = 1.0
    clamp_delta: float = 1e-6

    def __post_init__(self):
        if not isinstance(self.ramp_kind, RampKind):
            object.__setattr__(self, "ramp_kind", RampKind(self.ramp_kind))
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ParameterError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (math.isfinite(self.M) and self.M >= 0):
            raise ParameterError(f"M must be non-negative, got {self.M!r}")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ParameterError(f"k must be positive, got {self.k!r}")
        if not self.ramp_exponent >= 1:
            raise ParameterError(f"ramp exponent must be >= 1, got {self.ramp_exponent!r}")
        if not 0 < self.clamp_delta < 1:
            raise ParameterError(f"clamp_delta must lie in (0, 1), got {self.clamp_delta!r}")

    def ramp(self, t: float) -> float:
        if self.ramp_kind is RampKind.POWER_LAW:
            return t**self.ramp_exponent
        return t


class Phase(enum.Enum):
    PRE_LATCH = "PreLatch"
    POST_LATCH = "PostLatch"


@dataclass
class GainState:
    """Mutable latch state of one simulation run."""

    phase: Phase = Phase.PRE_LATCH
    latch_time: Optional[float] = None
    clamp_events: int = 0
    last_t: Optional[float] = None


def eta(schedule: GainSchedule, t: float) -> float:
    if t < 0:
        raise DomainError(f"eta is defined for t >= 0, got {t!r}")
    return schedule.epsilon * math.exp(-schedule.M * t)


def barrier_F(xi: float, x: float, clamp_delta: float = 1e-6, state: Optional[GainState] = None) -> float:
    """``xi / (xi - x)`` with ``x`` clamped into ``[0, (1 - clamp_delta) xi]``.

    When the upper clamp fires and ``state`` is given, its
    ``clamp_events`` counter is incremented.
    """
    if not xi > 0:
        raise DomainError(f"barrier needs xi > 0, got {xi!r}")
    top = (1.0 - clamp_delta) * xi
    if x > top:
        x = top
        if state is not None:
            state.clamp_events += 1
    elif x < 0.0:
        x = 0.0
    return xi / (xi - x)


def gain_update(schedule: GainSchedule, state: GainState, t: float, V: float):
    """Advance the latch and return ``(phi_hat, state)``.

    Before the latch ``phi_hat`` is the time ramp. The latch fires at the
    first call with ``V <= eta(t)/2`` and from then on ``phi_hat`` is the
    barrier value ``F_eta(t)(V)``. ``state`` is updated in place.
    """
    if state.last_t is not None and t < state.last_t:
        raise ContractViolation(f"time went backwards: {t!r} < {state.last_t!r}")
    state.last_t = t
    e = eta(schedule, t)
    if state.phase is Phase.PRE_LATCH:
        if V <= 0.5 * e:
            state.phase = Phase.POST_LATCH
            state.latch_time = t
        else:
            return schedule.ramp(t), state
    return barrier_F(e, V, schedule.clamp_delta, state), state


def in_domain(schedule: GainSchedule, t: float, V: float) -> bool:
    """Membership of a state with Lyapunov value ``V`` in ``{V <= eta(t)}``."""
    return V <= eta(schedule, t)
