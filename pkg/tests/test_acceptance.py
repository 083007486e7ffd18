"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line through the ``criterion`` fixture; the
lines are printed in the terminal summary. Runtime limits are asserted
alongside the numerical checks.
"""
import functools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from r3_oracle import V3, psi3, x_inner
from barrier_hosm import (
    ControllerMode,
    HongParams,
    Scenario,
    Trace,
    UncertaintySpec,
    accuracy_metrics,
    apply_dilation,
    compute_metrics,
    fit_decay,
    grad_V,
    load_scenario,
    lyapunov_V,
    lyapunov_V_quad,
    make_profile,
    psi_r,
    simulate,
    trap_check,
    u0,
)
from barrier_hosm import cli

SCEN = Path(__file__).resolve().parent.parent / "scenarios"
L = (1.0, 2.0, 5.0)
Z0 = (4.0, 4.0, -4.0)
HORIZON = 15.0
LATE = (10.0, 15.0)


def _points(n, seed, box=5.0):
    return np.random.default_rng(seed).uniform(-box, box, size=(n, 3))


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


@functools.lru_cache(maxsize=None)
def _known_bounds_run(tau):
    sc = load_scenario(SCEN / "known_bounds.toml").replace(tau=tau, horizon=HORIZON, record_stride=1)
    start = time.perf_counter()
    tr = simulate(sc)
    return sc, tr, time.perf_counter() - start


@functools.lru_cache(maxsize=None)
def _barrier_run():
    sc = load_scenario(SCEN / "barrier_gain.toml").replace(tau=1e-4, horizon=HORIZON, record_stride=1)
    start = time.perf_counter()
    tr = simulate(sc)
    return sc, tr, time.perf_counter() - start


def test_c1_closed_form_lyapunov(hong3, criterion):
    criterion("1 closed-form V vs explicit r=3 formula and quadrature")
    pts = _points(1000, 1)
    start = time.perf_counter()
    worst_formula = max(_rel(lyapunov_V(hong3, z), V3(z, L)) for z in pts)
    worst_quad = max(_rel(lyapunov_V(hong3, z), lyapunov_V_quad(hong3, z)) for z in pts)
    elapsed = time.perf_counter() - start
    criterion("1 closed-form V vs explicit r=3 formula and quadrature",
              f"formula {worst_formula:.1e}, quad {worst_quad:.1e}, {elapsed:.2f}s")
    assert worst_formula <= 1e-12
    assert worst_quad <= 1e-8
    assert elapsed < 5.0


def test_c2_homogeneity(hong3, criterion):
    label = "2 homogeneity of V, sign-form u0 invariance, psi3 closed form"
    criterion(label)
    prof = hong3.profile
    rng = np.random.default_rng(2)
    pts = _points(10_000, 2)
    eps_all = rng.uniform(0.5, 2.0, size=len(pts))
    start = time.perf_counter()
    worst_v, flips, worst_psi = 0.0, 0, 0.0
    for z, eps in zip(pts, eps_all):
        zd = apply_dilation(prof, eps, z)
        worst_v = max(worst_v, _rel(lyapunov_V(hong3, zd), eps ** (5 / 3) * lyapunov_V(hong3, z)))
        if u0(hong3, zd, mode="sign") != u0(hong3, z, mode="sign"):
            flips += 1
        # measured against the size of the two terms that make up psi3
        scale = abs(z[2]) ** 4 + L[1] ** 4 * abs(x_inner(z, L)) ** (4 / 3)
        worst_psi = max(worst_psi, abs(psi_r(hong3, z) - psi3(z, L)) / scale)
    elapsed = time.perf_counter() - start
    criterion(label, f"V {worst_v:.1e}, u0 changes {flips}, psi3 {worst_psi:.1e}, {elapsed:.2f}s")
    assert worst_v <= 1e-9
    assert flips == 0
    assert worst_psi <= 1e-12
    assert elapsed < 10.0


def test_c3_geometric_condition(hong3, criterion):
    label = "3 u0 * dV/dz3 <= 0 with finite-difference gradients"
    criterion(label)
    pts = _points(10_000, 3)
    start = time.perf_counter()
    bad, worst = 0, 0.0
    for z in pts:
        dvr = grad_V(hong3, z)[2]
        for mode in ("sign", "continuous"):
            u = u0(hong3, z, mode=mode)
            lhs = u * dvr
            if lhs > 1e-9 * (1.0 + abs(u) * abs(dvr)):
                bad += 1
            worst = max(worst, lhs)
    elapsed = time.perf_counter() - start
    criterion(label, f"{bad} violations, max u0*dV/dz3 {worst:.1e}, {elapsed:.2f}s")
    assert bad == 0
    assert elapsed < 30.0


@pytest.mark.parametrize("tau", [1e-4, 1e-5], ids=["tau1e-4", "tau1e-5"])
def test_c4_known_bounds_accuracy(tau, criterion):
    label = f"4 known-bounds run converges and lambda <= (20000, 500, 200) at tau={tau:g}"
    criterion(label)
    _, tr, elapsed = _known_bounds_run(tau)
    norm = np.abs(tr.states).max(axis=1)
    after = np.flatnonzero(norm >= 0.1)
    settle = tr.times[after[-1] + 1] if len(after) and after[-1] + 1 < len(tr.times) else float("inf")
    lam = accuracy_metrics(tr, tau, LATE).accuracy_lambdas
    lam_txt = "none" if lam is None else ", ".join(f"{x:.0f}" for x in lam)
    criterion(label, f"|z| < 0.1 from t={settle:.2f}, lambda ({lam_txt}), {elapsed:.1f}s")
    assert settle <= 10.0
    assert lam is not None
    assert lam[0] <= 20000 and lam[1] <= 500 and lam[2] <= 200
    assert elapsed < 120.0


def test_c5_barrier_trap(criterion):
    label = "5 barrier run latches, phi_hat = t before latch, no trap violations"
    criterion(label)
    sc, tr, elapsed = _barrier_run()
    assert tr.latch_time is not None and np.isfinite(tr.latch_time)
    before = tr.times < tr.latch_time
    ramp_err = np.abs(tr.phi_hat_vals[before] - tr.times[before]).max()
    violations, excess = trap_check(tr, sc.schedule, 1e-3)
    criterion(label, f"latch {tr.latch_time:.4f}s, ramp err {ramp_err:.1e}, "
                     f"{violations} violations, max excess {excess:.2e}, {elapsed:.1f}s")
    assert ramp_err == 0.0
    assert violations == 0
    assert elapsed < 60.0


def test_c6_gain_non_overestimation(criterion):
    label = "6 Phi_bar = 25, late sup|u| <= 31.5, fixed gain |u| = 30 off psi3 = 0"
    criterion(label)
    sc, tr, _ = _barrier_run()
    m = compute_metrics(tr, sc, window=LATE)
    fsc, ftr, _ = _known_bounds_run(1e-4)
    psi = np.array([psi_r(fsc.hong, z) for z in ftr.states])
    off = psi != 0
    wrong = int(np.count_nonzero(np.abs(ftr.controls[off]) != 30.0))
    criterion(label, f"Phi_bar {m.phi_bar_bar}, sup|u| {m.gain_sup_late:.3f}, "
                     f"{wrong} fixed-gain samples with |u| != 30")
    assert m.phi_bar_bar == 25.0
    assert m.gain_sup_late <= (5 + 25) * 1.05
    assert wrong == 0


def _order_ratio(params, tau):
    def run(step):
        sc = Scenario(params, ControllerMode.nominal_continuous(), UncertaintySpec(), Z0, step, 1.0)
        return simulate(sc).states

    a, b, c = run(tau), run(tau / 2), run(tau / 4)
    return np.abs(a - b[::2]).max() / np.abs(b - c[::2]).max()


def test_c7_integrator_order(criterion):
    label = "7 Euler error ratio per halving in [1.5, 3] over three tau decades"
    criterion(label)
    params = HongParams(make_profile(3, -0.1), L)
    ratios = [_order_ratio(params, tau) for tau in (1e-2, 1e-3, 1e-4)]
    criterion(label, "ratios " + ", ".join(f"{x:.3f}" for x in ratios))
    assert all(1.5 <= x <= 3.0 for x in ratios)


def test_c8_fit_decay(criterion):
    label = "8 fit_decay recovers (2, 0.5) from dV/dt = -2 V^(1/2)"
    criterion(label)
    # sqrt(V) = sqrt(V0) - t, so V0 = 4 reaches zero at t = 2
    t = np.linspace(0.0, 1.9, 20_001)
    V = (2.0 - t) ** 2
    z = np.zeros((len(t), 3))
    tr = Trace(times=t, states=z, controls=np.zeros(len(t)), V_vals=V)
    c, alpha = fit_decay(tr)
    criterion(label, f"c {c:.5f}, alpha {alpha:.5f}")
    assert abs(c - 2.0) <= 0.02 * 2.0
    assert abs(alpha - 0.5) <= 0.02 * 0.5


def test_c9_determinism_and_persistence(tmp_path, criterion):
    label = "9 simulate -> CSV -> report matches in memory, reruns bit-identical"
    criterion(label)
    sc, tr, _ = _barrier_run()
    again = simulate(sc)
    same = all(
        np.array_equal(getattr(tr, f), getattr(again, f))
        for f in ("times", "states", "controls", "V_vals", "eta_vals", "phi_hat_vals")
    ) and tr.latch_time == again.latch_time and tr.clamp_events == again.clamp_events

    direct = compute_metrics(tr, sc).to_dict()
    trace_path, scen_path = tmp_path / "trace.csv", tmp_path / "scenario.toml"
    out = tmp_path / "metrics.json"
    scen_path.write_text((SCEN / "barrier_gain.toml").read_text().replace("record_stride = 10", "record_stride = 1"))
    tr.to_csv(trace_path)
    code = cli.run_cli(["report", str(trace_path), str(scen_path), "--out-metrics", str(out)])
    reported = json.loads(out.read_text())
    in_memory = json.loads(json.dumps(direct))
    diff = sorted(k for k in set(reported) | set(in_memory) if reported.get(k) != in_memory.get(k))
    criterion(label, f"rerun identical {same}, report exit {code}, differing fields {diff or 'none'}")
    assert same
    assert code == 0
    assert reported == in_memory
