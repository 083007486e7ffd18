"""Hong's recursive homogeneous controller and the composed feedback laws."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigurationError, ContractViolation, ParameterError
from .homogeneity import DilationProfile, _spow, check_state, sgn


@dataclass(frozen=True)
class HongParams:
    """Dilation profile plus the positive recursion gains ``l_1 .. l_r``."""

    profile: DilationProfile
    gains: tuple

    def __post_init__(self):
        gains = tuple(float(g) for g in self.gains)
        object.__setattr__(self, "gains", gains)
        if len(gains) != self.profile.r:
            raise ParameterError(
                f"need {self.profile.r} gains for r={self.profile.r}, got {len(gains)}"
            )
        if not all(math.isfinite(g) and g > 0 for g in gains):
            raise ParameterError(f"gains must be positive, got {gains}")
        # Hong's Lyapunov terms share one degree only for unit base weight
        if self.profile.p_base != 1.0:
            raise ConfigurationError(
                f"Hong's construction needs p_base = 1, got {self.profile.p_base}"
            )

    @property
    def r(self) -> int:
        return self.profile.r

    @property
    def l_r(self) -> float:
        return self.gains[-1]


class GainKind(enum.Enum):
    CONSTANT = "Constant"
    AFFINE = "Affine"


@dataclass(frozen=True)
class GainFunctionSpec:
    """Non-decreasing positive gain ``g(x) = c0 + c1 * x``.

    ``Constant`` ignores ``c1``.
    """

    kind: GainKind = GainKind.CONSTANT
    c0: float = 1.0
    c1: float = 0.0

    def __post_init__(self):
        kind = GainKind(self.kind) if not isinstance(self.kind, GainKind) else self.kind
        object.__setattr__(self, "kind", kind)
        if not (math.isfinite(self.c0) and self.c0 > 0):
            raise ParameterError(f"g needs c0 > 0, got {self.c0!r}")
        if not (math.isfinite(self.c1) and self.c1 >= 0):
            raise ParameterError(f"g needs c1 >= 0, got {self.c1!r}")

    def __call__(self, x: float) -> float:
        if self.kind is GainKind.AFFINE:
            return self.c0 + self.c1 * x
        return self.c0


class Variant(enum.Enum):
    NOMINAL_CONTINUOUS = "NominalContinuous"
    NOMINAL_SIGN = "NominalSign"
    FIXED_GAIN_ROBUST = "FixedGainRobust"
    BARRIER_TIME_VARYING = "BarrierTimeVarying"


@dataclass(frozen=True)
class ControllerMode:
    """Which feedback law to apply, with its variant-specific constants.

    ``k`` and ``g`` belong to the barrier law; ``phi_bar`` and ``gamma_m``
    are the known bounds the fixed-gain law is tuned with.
    """

    variant: Variant
    k: Optional[float] = None
    g: Optional[GainFunctionSpec] = None
    phi_bar: Optional[float] = None
    gamma_m: Optional[float] = None

    def __post_init__(self):
        variant = Variant(self.variant) if not isinstance(self.variant, Variant) else self.variant
        object.__setattr__(self, "variant", variant)
        if variant is Variant.BARRIER_TIME_VARYING:
            if self.k is None or not (math.isfinite(self.k) and self.k > 0):
                raise ParameterError(f"barrier law needs k > 0, got {self.k!r}")
            if self.g is None:
                object.__setattr__(self, "g", GainFunctionSpec())
        elif variant is Variant.FIXED_GAIN_ROBUST:
            if self.phi_bar is None or not self.phi_bar >= 0:
                raise ParameterError(f"fixed-gain law needs phi_bar >= 0, got {self.phi_bar!r}")
            if self.gamma_m is None or not self.gamma_m > 0:
                raise ParameterError(f"fixed-gain law needs gamma_m > 0, got {self.gamma_m!r}")

    @classmethod
    def nominal_continuous(cls):
        return cls(Variant.NOMINAL_CONTINUOUS)

    @classmethod
    def nominal_sign(cls):
        return cls(Variant.NOMINAL_SIGN)

    @classmethod
    def fixed_gain(cls, phi_bar, gamma_m):
        return cls(Variant.FIXED_GAIN_ROBUST, phi_bar=phi_bar, gamma_m=gamma_m)

    @classmethod
    def barrier(cls, k=1.0, g=None):
        return cls(Variant.BARRIER_TIME_VARYING, k=k, g=g or GainFunctionSpec())

    def check(self, params: HongParams) -> None:
        """Raise :class:`ConfigurationError` if the law needs the boundary degree."""
        needs_boundary = self.variant in (Variant.NOMINAL_SIGN, Variant.FIXED_GAIN_ROBUST)
        if needs_boundary and not params.profile.is_boundary:
            raise ConfigurationError(
                f"{self.variant.value} needs kappa = -p_base/r, "
                f"got kappa={params.profile.kappa!r} for r={params.r}"
            )

    def equivalent_gains(self):
        """``(k, g)`` such that the law reads ``g(|u0|) u0 + k sgn(u0) phi_hat``.

        The fixed-gain law is the special case ``k = phi_bar/gamma_m``,
        ``g = 1/gamma_m``, ``phi_hat = 1``. Nominal laws return ``None``.
        """
        if self.variant is Variant.BARRIER_TIME_VARYING:
            return self.k, self.g
        if self.variant is Variant.FIXED_GAIN_ROBUST:
            return self.phi_bar / self.gamma_m, GainFunctionSpec(GainKind.CONSTANT, 1.0 / self.gamma_m)
        return None


def _chain(z, gains, betas, rec_exps):
    """Recursion with each ``v_i`` held as ``-c * sgp(base, q)``.

    Raising ``v_i`` to the next beta then costs one power instead of two,
    which keeps ``psi_r`` accurate where its inner differences cancel.
    """
    v = [0.0]
    c, base, q = 0.0, 0.0, 1.0
    for zi, li, b, e in zip(z, gains, betas, rec_exps):
        sv = -(c**b) * _spow(base, q * b)
        if sv == 0.0:
            base, q = zi, b * e
        else:
            base, q = _spow(zi, b) - sv, e
        c = li
        v.append(-c * _spow(base, q))
    return v, c, base, q


def _vchain(z, gains, betas, rec_exps):
    return _chain(z, gains, betas, rec_exps)[0]


def _psi(z, gains, betas, rec_exps):
    r = len(z)
    _, c, base, q = _chain(z[: r - 1], gains, betas, rec_exps)
    b = betas[r - 1]
    return _spow(z[r - 1], b) + c**b * _spow(base, q * b)


def v_chain(params: HongParams, z: Sequence[float]) -> list:
    """Hong's recursion ``v_0 .. v_r``; the continuous nominal control is ``v_r``."""
    z = check_state(z, params.r)
    p = params.profile
    return _vchain(z, params.gains, p.betas, p.rec_exps)


def psi_r(params: HongParams, z: Sequence[float]) -> float:
    """Switching function ``sgp(z_r, b) - sgp(v_{r-1}, b)`` with ``b = beta_{r-1}``."""
    z = check_state(z, params.r)
    p = params.profile
    return _psi(z, params.gains, p.betas, p.rec_exps)


def u0(params: HongParams, z: Sequence[float], mode: str = "continuous") -> float:
    """Nominal controller.

    ``mode="continuous"`` returns ``v_r``; ``mode="sign"`` returns
    ``-l_r * sgn(psi_r(z))`` and requires the boundary degree.
    """
    if mode == "continuous":
        return v_chain(params, z)[-1]
    if mode == "sign":
        if not params.profile.is_boundary:
            raise ConfigurationError("sign-form u0 needs kappa = -p_base/r")
        return -params.l_r * sgn(psi_r(params, z))
    raise ConfigurationError(f"unknown u0 mode {mode!r}")


def control(
    mode: ControllerMode,
    params: HongParams,
    z: Sequence[float],
    phi_hat: Optional[float] = None,
) -> float:
    """Evaluate the feedback law selected by ``mode`` at state ``z``.

    ``phi_hat`` is the barrier gain and is only read by the barrier law.
    """
    variant = mode.variant
    if variant is Variant.NOMINAL_CONTINUOUS:
        return u0(params, z, "continuous")
    if variant is Variant.NOMINAL_SIGN:
        return u0(params, z, "sign")
    if variant is Variant.FIXED_GAIN_ROBUST:
        mode.check(params)
        return -((params.l_r + mode.phi_bar) / mode.gamma_m) * sgn(psi_r(params, z))
    if phi_hat is None:
        raise ContractViolation("barrier law evaluated without phi_hat")
    if params.profile.is_boundary:
        return -(mode.g(params.l_r) * params.l_r + mode.k * phi_hat) * sgn(psi_r(params, z))
    u = u0(params, z, "continuous")
    return mode.g(abs(u)) * u + mode.k * sgn(u) * phi_hat
