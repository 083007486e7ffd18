"""How the steady-state error of the fixed-gain loop scales with tau.

Halving tau halves sup|z3| cleanly. sup|z1| and sup|z2| fall faster but
less regularly, since a sup over the window picks out isolated chatter
peaks.
"""
from pathlib import Path

from barrier_hosm import accuracy_metrics, load_scenario, simulate

HERE = Path(__file__).resolve().parent
base = load_scenario(HERE.parent / "scenarios" / "known_bounds.toml").replace(horizon=12.0)

prev = None
for tau in (4e-4, 2e-4, 1e-4, 5e-5):
    sc = base.replace(tau=tau)
    sup = accuracy_metrics(simulate(sc), tau, (9.0, 12.0)).steady_sup
    line = f"tau={tau:.0e}  sup|z|=" + ", ".join(f"{x:.2e}" for x in sup)
    if prev is not None:
        line += "  ratios " + ", ".join(f"{a / b:5.2f}" for a, b in zip(prev, sup))
    print(line)
    prev = sup
