"""Perturbed integrator chain and a fixed-step Euler / zero-order-hold loop."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .controllers import ControllerMode, HongParams, Variant, _psi, _vchain
from .errors import ContractViolation, DivergenceError, ParameterError, ShapeError
from .homogeneity import check_state, sgn
from .lyapunov import GainSchedule, GainState, _lyap, eta, gain_update

MAX_STEPS = 10**8
BLOWUP = 1e12

_ATOMS = {
    "const": lambda w, t: 1.0,
    "sin": lambda w, t: math.sin(w * t),
    "cos": lambda w, t: math.cos(w * t),
    "sgn_sin": lambda w, t: sgn(math.sin(w * t)),
    "sgn_cos": lambda w, t: sgn(math.cos(w * t)),
}


@dataclass(frozen=True)
class Bounds:
    """Declared uncertainty bounds ``|phi| <= phi_bar``, ``gamma_m <= gamma <= gamma_M``."""

    phi_bar: float
    gamma_m: float
    gamma_M: float

    def __post_init__(self):
        if not (self.phi_bar >= 0 and 0 < self.gamma_m <= self.gamma_M):
            raise ParameterError(f"inconsistent bounds {self}")


@dataclass(frozen=True)
class UncertaintySpec:
    """Sums of signal atoms ``(kind, amplitude, frequency)``.

    ``kind`` is one of ``const``, ``sin``, ``cos``, ``sgn_sin``, ``sgn_cos``;
    ``const`` ignores the frequency. An empty gamma list means ``gamma = 1``.
    """

    phi_terms: tuple = ()
    gamma_terms: tuple = ()
    bounds: Optional[Bounds] = None

    def __post_init__(self):
        for name in ("phi_terms", "gamma_terms"):
            terms = tuple((str(k), float(a), float(w)) for k, a, w in getattr(self, name))
            for kind, _, _ in terms:
                if kind not in _ATOMS:
                    raise ParameterError(f"unknown signal atom {kind!r}")
            object.__setattr__(self, name, terms)

    @classmethod
    def benchmark(cls, declare_bounds: bool = True):
        """``phi = 5 sgn(cos t) - 20 sin 2t``, ``gamma = 3 - 2 sgn(sin 3t)``."""
        return cls(
            phi_terms=(("sgn_cos", 5.0, 1.0), ("sin", -20.0, 2.0)),
            gamma_terms=(("const", 3.0, 0.0), ("sgn_sin", -2.0, 3.0)),
            bounds=Bounds(25.0, 1.0, 5.0) if declare_bounds else None,
        )


def _signal(terms, t):
    return sum(a * _ATOMS[kind](w, t) for kind, a, w in terms)


def eval_uncertainty(spec: UncertaintySpec, t: float):
    """Return ``(phi(t), gamma(t))``."""
    phi = _signal(spec.phi_terms, t) if spec.phi_terms else 0.0
    gamma = _signal(spec.gamma_terms, t) if spec.gamma_terms else 1.0
    return float(phi), float(gamma)


def chain_rhs(r: int, z: Sequence[float], phi: float, gamma: float, u: float) -> np.ndarray:
    """Right-hand side ``(z_2, ..., z_r, phi + gamma u)`` of the perturbed chain."""
    z = check_state(z, r)
    return np.array(z[1:] + [phi + gamma * u])


@dataclass(frozen=True)
class Scenario:
    """One simulation instance."""

    hong: HongParams
    mode: ControllerMode
    uncertainty: UncertaintySpec
    z0: tuple
    tau: float
    horizon: float
    record_stride: int = 1
    schedule: Optional[GainSchedule] = None

    def __post_init__(self):
        object.__setattr__(self, "z0", tuple(check_state(self.z0, self.hong.r)))
        if not (self.tau > 0 and self.horizon > 0):
            raise ParameterError("tau and horizon must be positive")
        if self.horizon / self.tau > MAX_STEPS:
            raise ParameterError(f"horizon/tau exceeds the {MAX_STEPS:.0e} step guard")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ParameterError(f"record_stride must be a positive integer, got {self.record_stride!r}")
        barrier = self.mode.variant is Variant.BARRIER_TIME_VARYING
        if barrier != (self.schedule is not None):
            raise ParameterError("a gain schedule is required by, and only by, the barrier law")
        if barrier and (self.schedule.k != self.mode.k or self.schedule.g != self.mode.g):
            raise ParameterError("schedule and controller disagree on k or g")
        self.mode.check(self.hong)

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.horizon / self.tau - 1e-9))

    def replace(self, **changes) -> "Scenario":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass
class Trace:
    """Recorded samples of one run. ``eta_vals``/``phi_hat_vals`` exist only with a schedule."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    V_vals: np.ndarray
    eta_vals: Optional[np.ndarray] = None
    phi_hat_vals: Optional[np.ndarray] = None
    latch_time: Optional[float] = None
    clamp_events: int = 0

    def __len__(self):
        return len(self.times)

    @property
    def r(self) -> int:
        return self.states.shape[1]

    def to_csv(self, path) -> None:
        """Write ``t,z1..zr,u,V,eta,phi_hat`` at 17 significant digits.

        Latch time and clamp count go on leading ``#`` comment lines.
        """
        fmt = "%.17g"
        with open(path, "w", newline="") as fh:
            lt = "" if self.latch_time is None else fmt % self.latch_time
            fh.write(f"# latch_time={lt}\n# clamp_events={self.clamp_events}\n")
            w = csv.writer(fh)
            w.writerow(["t"] + [f"z{i + 1}" for i in range(self.r)] + ["u", "V", "eta", "phi_hat"])
            for i in range(len(self.times)):
                row = [fmt % self.times[i]]
                row += [fmt % x for x in self.states[i]]
                row += [fmt % self.controls[i], fmt % self.V_vals[i]]
                row.append("" if self.eta_vals is None else fmt % self.eta_vals[i])
                row.append("" if self.phi_hat_vals is None else fmt % self.phi_hat_vals[i])
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "Trace":
        meta = {}
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
            elif line:
                body.append(line)
        rows = list(csv.reader(body))
        header, rows = rows[0], rows[1:]
        r = sum(1 for h in header if h.startswith("z"))
        if header != ["t"] + [f"z{i + 1}" for i in range(r)] + ["u", "V", "eta", "phi_hat"]:
            raise ShapeError(f"unexpected trace header {header}")

        def col(j, optional=False):
            if optional and all(row[j] == "" for row in rows):
                return None
            return np.array([float(row[j]) for row in rows])

        lt = meta.get("latch_time", "")
        return cls(
            times=col(0),
            states=np.column_stack([col(1 + i) for i in range(r)]) if rows else np.empty((0, r)),
            controls=col(r + 1),
            V_vals=col(r + 2),
            eta_vals=col(r + 3, optional=True),
            phi_hat_vals=col(r + 4, optional=True),
            latch_time=float(lt) if lt else None,
            clamp_events=int(meta.get("clamp_events", 0) or 0),
        )


def _control_law(mode: ControllerMode, params: HongParams):
    """Fast ``(z, phi_hat) -> u`` closure for the inner loop."""
    p = params.profile
    gains, betas, rec = params.gains, p.betas, p.rec_exps
    l_r = params.l_r
    variant = mode.variant
    if variant is Variant.NOMINAL_CONTINUOUS:
        return lambda z, ph: _vchain(z, gains, betas, rec)[-1]
    if variant is Variant.NOMINAL_SIGN:
        return lambda z, ph: -l_r * sgn(_psi(z, gains, betas, rec))
    if variant is Variant.FIXED_GAIN_ROBUST:
        amp = (l_r + mode.phi_bar) / mode.gamma_m
        return lambda z, ph: -amp * sgn(_psi(z, gains, betas, rec))
    g, k = mode.g, mode.k
    if p.is_boundary:
        base = g(l_r) * l_r
        return lambda z, ph: -(base + k * ph) * sgn(_psi(z, gains, betas, rec))

    def law(z, ph):
        u = _vchain(z, gains, betas, rec)[-1]
        return g(abs(u)) * u + k * sgn(u) * ph

    return law


def simulate(scenario: Scenario) -> Trace:
    """Run the closed loop with explicit Euler and zero-order hold.

    At ``t_k = k tau`` the Lyapunov value, the barrier gain (barrier law
    only) and the control are computed from ``z_k``; control and
    uncertainties are then held over ``[t_k, t_{k+1})``. Every
    ``record_stride``-th sample and the final one are kept.
    """
    params = scenario.hong
    p = params.profile
    args = (params.gains, p.betas, p.rec_exps)
    r = params.r
    tau = scenario.tau
    n = scenario.n_steps
    stride = int(scenario.record_stride)
    law = _control_law(scenario.mode, params)
    schedule = scenario.schedule
    state = GainState() if schedule is not None else None
    phi_terms = scenario.uncertainty.phi_terms
    gamma_terms = scenario.uncertainty.gamma_terms
    bounds = scenario.uncertainty.bounds
    if bounds is not None:
        phi_lim = bounds.phi_bar * (1 + 1e-12)
        g_lo = bounds.gamma_m * (1 - 1e-12)
        g_hi = bounds.gamma_M * (1 + 1e-12)

    n_rec = n // stride + 1 + (1 if n % stride else 0)
    times = np.empty(n_rec)
    states = np.empty((n_rec, r))
    controls = np.empty(n_rec)
    V_vals = np.empty(n_rec)
    eta_vals = np.empty(n_rec) if schedule is not None else None
    phi_vals = np.empty(n_rec) if schedule is not None else None

    z = list(scenario.z0)
    j = 0
    for k in range(n + 1):
        t = k * tau
        V = _lyap(z, *args)
        if schedule is not None:
            phi_hat, _ = gain_update(schedule, state, t, V)
        else:
            phi_hat = None
        u = law(z, phi_hat)
        if k % stride == 0 or k == n:
            times[j] = t
            states[j] = z
            controls[j] = u
            V_vals[j] = V
            if schedule is not None:
                eta_vals[j] = eta(schedule, t)
                phi_vals[j] = phi_hat
            j += 1
        if k == n:
            break
        phi = _signal(phi_terms, t) if phi_terms else 0.0
        gamma = _signal(gamma_terms, t) if gamma_terms else 1.0
        if bounds is not None and not (abs(phi) <= phi_lim and g_lo <= gamma <= g_hi):
            raise ContractViolation(
                f"uncertainty left its declared bounds at step {k}: phi={phi!r}, gamma={gamma!r}"
            )
        z = [z[i] + tau * z[i + 1] for i in range(r - 1)] + [z[r - 1] + tau * (phi + gamma * u)]
        if not max(abs(x) for x in z) <= BLOWUP:
            raise DivergenceError(k + 1)

    return Trace(
        times=times,
        states=states,
        controls=controls,
        V_vals=V_vals,
        eta_vals=eta_vals,
        phi_hat_vals=phi_vals,
        latch_time=state.latch_time if state is not None else None,
        clamp_events=state.clamp_events if state is not None else 0,
    )
