"""Trace metrics, property checks and diagnostic fits."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .controllers import ControllerMode, GainFunctionSpec, GainKind, HongParams, _psi, _vchain
from .errors import ContractViolation, InsufficientDataError, ParameterError
from .homogeneity import apply_dilation, sgn
from .lyapunov import GainSchedule, _lyap, eta, grad_V, lyapunov_V_quad
from .rng import SplitMix64
from .simulation import Bounds, Scenario, Trace

_T_EPS = 1e-9


@dataclass
class SummaryMetrics:
    """Derived diagnostics of one trace. ``None`` marks an undefined field."""

    latch_time: Optional[float] = None
    steady_sup: Optional[list] = None
    accuracy_lambdas: Optional[list] = None
    trap_violations: Optional[int] = None
    max_trap_excess: Optional[float] = None
    sharp_trap_violations: Optional[int] = None
    gain_sup_late: Optional[float] = None
    gain_bound: Optional[float] = None
    phi_bar_bar: Optional[float] = None
    h_m: Optional[float] = None
    h_m_unbounded: Optional[bool] = None
    clamp_events: int = 0
    window: Optional[list] = None
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def default_window(horizon: float):
    """Final third of the horizon."""
    return (2.0 * horizon / 3.0, horizon)


def _window_mask(times, window):
    t0, t1 = window
    return (times >= t0 - _T_EPS) & (times <= t1 + _T_EPS)


def accuracy_metrics(trace: Trace, tau: float, window, converge_tol: float = 0.1) -> SummaryMetrics:
    """Steady-state sup of each ``|z_i|`` over ``window`` and ``lambda_i = sup_i / tau**(r+1-i)``.

    ``accuracy_lambdas`` is left undefined when the window sup of
    ``||z||_inf`` is not below ``converge_tol``.
    """
    mask = _window_mask(trace.times, window)
    if not mask.any():
        raise ParameterError(f"window {window} contains no samples")
    r = trace.r
    sup = np.abs(trace.states[mask]).max(axis=0)
    out = SummaryMetrics(steady_sup=[float(s) for s in sup], window=[float(w) for w in window])
    if sup.max() < converge_tol:
        out.accuracy_lambdas = [float(sup[i] / tau ** (r - i)) for i in range(r)]
    return out


def trap_check(trace: Trace, schedule: GainSchedule, tol: float = 1e-3):
    """Count post-latch samples with ``V > eta(t) (1 + tol)``.

    Returns ``(violations, max_excess)`` where ``max_excess`` is the largest
    ``max(V/eta - 1, 0)`` after the latch.
    """
    if trace.latch_time is None:
        raise ContractViolation("trap check needs a trace that latched")
    after = trace.times > trace.latch_time
    V = trace.V_vals[after]
    e = np.array([eta(schedule, t) for t in trace.times[after]])
    if V.size == 0:
        return 0, 0.0
    violations = int(np.count_nonzero(V > e * (1.0 + tol)))
    return violations, float(max(np.max(V / e - 1.0), 0.0))


def sharp_trap_check(trace: Trace, schedule: GainSchedule, phi_bar_bar: float, tol: float = 1e-3) -> int:
    """Post-latch samples above the finer level ``max(1/2, 1 - 1/phi_bar_bar) eta(t)``."""
    if trace.latch_time is None:
        raise ContractViolation("trap check needs a trace that latched")
    level = 0.5 if phi_bar_bar <= 2 else 1.0 - 1.0 / phi_bar_bar
    after = trace.times > trace.latch_time
    e = np.array([eta(schedule, t) for t in trace.times[after]])
    return int(np.count_nonzero(trace.V_vals[after] > level * e * (1.0 + tol)))


def h_min(g: GainFunctionSpec, gamma_m: float, bounded_u0: Optional[float] = None):
    """``min(0, min_{x>=0} x (gamma_m g(x) - 1))`` in closed form.

    Returns ``(h_m, unbounded)``. A constant ``g`` with ``gamma_m c0 < 1``
    makes the inner minimum ``-inf``; if ``bounded_u0`` is given (the
    sign-form controller, ``|u0| = l_r``) the minimum is taken at that
    single point instead and the flag stays set.
    """
    slope = gamma_m * g.c0 - 1.0
    if g.kind is GainKind.AFFINE and g.c1 > 0:
        if slope >= 0:
            return 0.0, False
        return -(slope**2) / (4.0 * gamma_m * g.c1), False
    if slope >= 0:
        return 0.0, False
    if bounded_u0 is not None:
        return min(0.0, bounded_u0 * (gamma_m * g(bounded_u0) - 1.0)), True
    return -math.inf, True


def gain_envelope(trace: Trace, mode: ControllerMode, params: HongParams, bounds: Bounds, window):
    """Late-window sup of ``|u|`` against the asymptotic bound ``M(u0) + k max(1, Phi)``.

    Returns ``(gain_sup_late, gain_bound, phi_bar_bar, h_m)``; the last
    three are ``None`` for the nominal laws.
    """
    mask = _window_mask(trace.times, window)
    if not mask.any():
        raise ParameterError(f"window {window} contains no samples")
    sup = float(np.abs(trace.controls[mask]).max())
    gains = mode.equivalent_gains()
    if gains is None:
        return sup, None, None, None
    k, g = gains
    boundary = params.profile.is_boundary
    h_m, _ = h_min(g, bounds.gamma_m, params.l_r if boundary else None)
    num = bounds.phi_bar - h_m
    if k > 0:
        phi_bb = num / (k * bounds.gamma_m)
    else:
        phi_bb = math.inf if num > 0 else 0.0
    m_u0 = g(params.l_r) * params.l_r if boundary else 0.0
    bound = m_u0 + (k * max(1.0, phi_bb) if k > 0 else 0.0)
    return sup, bound, phi_bb, h_m


def compute_metrics(
    trace: Trace,
    scenario: Scenario,
    window=None,
    tol: float = 1e-3,
    converge_tol: float = 0.1,
    gain_slack: float = 0.05,
) -> SummaryMetrics:
    """All metrics of a trace, as a pure function of ``(trace, scenario)``.

    ``failures`` lists the checks that did not hold: missing latch, trap
    violations, and a late control sup above ``(1 + gain_slack)`` times the
    asymptotic bound.
    """
    if window is None:
        window = default_window(scenario.horizon)
    m = accuracy_metrics(trace, scenario.tau, window, converge_tol)
    m.latch_time = trace.latch_time
    m.clamp_events = int(trace.clamp_events)
    mask = _window_mask(trace.times, window)
    m.gain_sup_late = float(np.abs(trace.controls[mask]).max())

    bounds = scenario.uncertainty.bounds
    if bounds is not None:
        sup, bound, phi_bb, h_m = gain_envelope(trace, scenario.mode, scenario.hong, bounds, window)
        if bound is not None:
            m.gain_bound, m.phi_bar_bar, m.h_m = bound, phi_bb, h_m
            m.h_m_unbounded = h_min(
                scenario.mode.equivalent_gains()[1], bounds.gamma_m,
            )[1]
            if sup > bound * (1.0 + gain_slack):
                m.failures.append("gain_envelope")

    if scenario.schedule is not None:
        if trace.latch_time is None:
            m.failures.append("no_latch")
        else:
            m.trap_violations, m.max_trap_excess = trap_check(trace, scenario.schedule, tol)
            if m.trap_violations:
                m.failures.append("trap")
            if m.phi_bar_bar is not None and math.isfinite(m.phi_bar_bar):
                m.sharp_trap_violations = sharp_trap_check(trace, scenario.schedule, m.phi_bar_bar, tol)
    return m


def _relerr(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def verify_assumptions(params: HongParams, sample_count: int = 10000, seed: int = 0,
                       box: float = 5.0, quad_samples: Optional[int] = None) -> dict:
    """Run the homogeneity and geometric-condition checks at random points.

    Points are uniform in ``[-box, box]^r`` and dilation factors uniform in
    ``[0.5, 2]``, both drawn from :class:`SplitMix64` with ``seed``.

    Checks
    ------
    dilation
        sign-form ``u0`` is dilation invariant (boundary degree), else the
        continuous ``u0`` scales like ``eps**p_{r+1}`` (rel. 1e-9).
    lyapunov_homogeneity
        ``V(delta_eps z) = eps**(beta_0 + 1) V(z)`` (rel. 1e-9).
    geometric
        ``u0 * dV/dz_r <= 1e-9 (1 + |u0| |dV/dz_r|)`` with a
        finite-difference gradient.
    quadrature
        closed-form ``V`` against quadrature (rel. 1e-8), on the first
        ``quad_samples`` points (all by default).
    """
    if sample_count < 1:
        raise ParameterError("sample_count must be >= 1")
    rng = SplitMix64(seed)
    prof = params.profile
    r = prof.r
    args = (params.gains, prof.betas, prof.rec_exps)
    boundary = prof.is_boundary
    deg_v = prof.lyapunov_degree
    deg_u = prof.weights[r]
    n_quad = sample_count if quad_samples is None else min(quad_samples, sample_count)

    checks = {
        name: {"passed": 0, "failed": 0, "worst": 0.0, "tol": tol}
        for name, tol in (("dilation", 0.0 if boundary else 1e-9), ("lyapunov_homogeneity", 1e-9),
                          ("geometric", 1e-9), ("quadrature", 1e-8))
    }

    def record(name, ok, resid):
        c = checks[name]
        c["passed" if ok else "failed"] += 1
        c["worst"] = max(c["worst"], float(resid))

    for n in range(sample_count):
        z = [rng.uniform(-box, box) for _ in range(r)]
        eps = rng.uniform(0.5, 2.0)
        zd = list(apply_dilation(prof, eps, z))

        if boundary:
            a = -params.l_r * sgn(_psi(z, *args))
            b = -params.l_r * sgn(_psi(zd, *args))
            record("dilation", a == b, abs(a - b))
        else:
            a = _vchain(zd, *args)[-1]
            b = eps**deg_u * _vchain(z, *args)[-1]
            e = _relerr(a, b)
            record("dilation", e <= 1e-9, e)

        V = _lyap(z, *args)
        e = _relerr(_lyap(zd, *args), eps**deg_v * V)
        record("lyapunov_homogeneity", e <= 1e-9, e)

        dvr = grad_V(params, z)[r - 1]
        u_vals = [_vchain(z, *args)[-1]]
        if boundary:
            u_vals.append(-params.l_r * sgn(_psi(z, *args)))
        for u in u_vals:
            lhs = u * dvr
            allowed = 1e-9 * (1.0 + abs(u) * abs(dvr))
            record("geometric", lhs <= allowed, max(lhs, 0.0))

        if n < n_quad:
            e = _relerr(V, lyapunov_V_quad(params, z))
            record("quadrature", e <= 1e-8, e)

    return {
        "samples": sample_count,
        "seed": seed,
        "checks": checks,
        "ok": all(c["failed"] == 0 for c in checks.values()),
    }


def fit_decay_series(times, V, min_samples: int = 10):
    """Least-squares fit of ``log(-dV/dt) = log c + alpha log V`` on decreasing steps."""
    times = np.asarray(times, dtype=float)
    V = np.asarray(V, dtype=float)
    dV = np.diff(V)
    dt = np.diff(times)
    use = (dV < 0) & (V[:-1] > 0) & (dt > 0)
    if np.count_nonzero(use) < min_samples:
        raise InsufficientDataError(
            f"only {np.count_nonzero(use)} decreasing samples, need {min_samples}"
        )
    x = np.log(V[:-1][use])
    y = np.log(-dV[use] / dt[use])
    alpha, logc = np.polyfit(x, y, 1)
    return float(math.exp(logc)), float(alpha)


def fit_decay(trace: Trace, window=None):
    """Estimate ``(c, alpha)`` in ``dV/dt <= -c V**alpha`` from a nominal trace.

    A diagnostic only: chattering near the origin contaminates the fit.
    """
    times, V = trace.times, trace.V_vals
    if window is not None:
        mask = _window_mask(times, window)
        times, V = times[mask], V[mask]
    return fit_decay_series(times, V)
