"""Signed powers and weighted dilations.

The weights follow the arithmetic family ``p_i = p_base + (i - 1) * kappa``
and the exponents used by Hong's recursive controller are derived from
them once, at profile construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError, ShapeError

# relative slack used to recognise kappa == -p_base / r
BOUNDARY_RTOL = 1e-12


def signed_pow(x: float, a: float) -> float:
    """Return ``|x|**a * sgn(x)`` with ``sgn(0) = 0``.

    For ``a = 0`` this is the sign function itself.
    """
    if not math.isfinite(x):
        raise DomainError(f"signed_pow needs a finite base, got {x!r}")
    if not a >= 0:
        raise DomainError(f"signed_pow needs a non-negative exponent, got {a!r}")
    return _spow(x, a)


def _spow(x, a):
    # unchecked variant for inner loops
    if x > 0.0:
        return x**a
    if x < 0.0:
        return -((-x) ** a)
    return 0.0


def sgn(x: float) -> float:
    """Single-valued sign, ``sgn(0) = 0``."""
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@dataclass(frozen=True)
class DilationProfile:
    """Homogeneity skeleton for a chain of length ``r``.

    Attributes
    ----------
    r : int
        Chain length.
    kappa : float
        Homogeneity degree (negative).
    p_base : float
        Weight of the first coordinate.
    weights : tuple of float
        ``p_1 .. p_{r+2}``.
    betas : tuple of float
        ``beta_0 .. beta_{r-1}`` of Hong's construction.
    rec_exps : tuple of float
        Outer exponent applied at each step of the v-recursion.
    """

    r: int
    kappa: float
    p_base: float
    weights: tuple
    betas: tuple
    rec_exps: tuple

    @property
    def is_boundary(self) -> bool:
        """True when ``kappa = -p_base / r`` (bounded, sign-form controller)."""
        return abs(self.kappa * self.r + self.p_base) <= BOUNDARY_RTOL * self.p_base

    def weight(self, i: int) -> float:
        """1-based weight ``p_i``."""
        return self.weights[i - 1]

    @property
    def lyapunov_degree(self) -> float:
        """Homogeneity degree ``beta_0 + 1`` of Hong's Lyapunov function."""
        return self.betas[0] + 1.0


def make_profile(r: int, kappa: float, p_base: float = 1.0) -> DilationProfile:
    """Build the dilation profile for chain length ``r`` and degree ``kappa``.

    ``kappa`` must lie in ``[-p_base / r, 0)``; interior degrees must also
    satisfy ``p_base + (r + 1) * kappa`` in ``[0, 1)``.  The lower end is the
    boundary degree at which the nominal controller becomes a pure sign
    law; there ``p_{r+1}`` is set to exactly zero so that the last
    recursion exponent is exactly zero as well.
    """
    if int(r) != r or r < 1:
        raise ParameterError(f"chain length must be a positive integer, got {r!r}")
    r = int(r)
    if not (math.isfinite(p_base) and p_base > 0):
        raise ParameterError(f"p_base must be positive, got {p_base!r}")
    if not math.isfinite(kappa):
        raise ParameterError(f"kappa must be finite, got {kappa!r}")
    lower = -p_base / r
    boundary = abs(kappa - lower) <= BOUNDARY_RTOL * p_base
    if boundary:
        kappa = lower
    elif not (lower < kappa < 0):
        raise ParameterError(
            f"kappa={kappa!r} outside [{lower!r}, 0) for r={r}, p_base={p_base!r}"
        )

    weights = [p_base + i * kappa for i in range(r + 2)]
    if not boundary and not (0.0 <= weights[r + 1] < 1.0):
        raise ParameterError(
            f"p_base + (r+1)*kappa = {weights[r + 1]!r} must lie in [0, 1) "
            "for an interior degree"
        )
    if boundary:
        weights[r] = 0.0
    beta0 = weights[1]
    betas = [beta0] + [(beta0 + 1.0) / weights[i] - 1.0 for i in range(1, r)]
    if any(b <= 0 for b in betas):
        raise ParameterError(
            f"kappa={kappa!r} gives non-positive Hong exponents {betas}; "
            "the degree is too negative for this chain length"
        )
    rec_exps = [weights[i + 1] / (weights[i] * betas[i]) for i in range(r)]
    return DilationProfile(
        r=r,
        kappa=float(kappa),
        p_base=float(p_base),
        weights=tuple(weights),
        betas=tuple(betas),
        rec_exps=tuple(rec_exps),
    )


def apply_dilation(profile: DilationProfile, eps: float, z: Sequence[float]) -> np.ndarray:
    """Return ``(eps**p_1 z_1, ..., eps**p_r z_r)``."""
    if not eps > 0:
        raise DomainError(f"dilation parameter must be positive, got {eps!r}")
    z = np.asarray(z, dtype=float)
    if z.shape != (profile.r,):
        raise ShapeError(f"expected a state of length {profile.r}, got shape {z.shape}")
    return np.array([eps ** p * zi for p, zi in zip(profile.weights[: profile.r], z)])


def check_state(z, r: int) -> list:
    """Coerce ``z`` to a list of ``r`` floats or raise :class:`ShapeError`."""
    try:
        n = len(z)
    except TypeError:
        raise ShapeError(f"state must be a sequence of length {r}") from None
    if n != r:
        raise ShapeError(f"expected a state of length {r}, got {n}")
    return [float(v) for v in z]
