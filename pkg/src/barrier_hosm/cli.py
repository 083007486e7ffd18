"""Command-line entry point: ``simulate``, ``verify``, ``accuracy``, ``report``.

Exit status is 0 on success, 1 when a check fails and 2 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .analysis import accuracy_metrics, compute_metrics, default_window, verify_assumptions
from .config import load_hong_params, load_scenario
from .errors import DivergenceError, HosmError
from .simulation import Trace, simulate


def _window(text):
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like t0:t1, got {text!r}") from None


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, allow_nan=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    try:
        trace = simulate(scenario)
    except DivergenceError as exc:
        _emit({"failures": ["divergence"], "step": exc.step}, args.out_metrics)
        return 1
    if args.out_trace:
        trace.to_csv(args.out_trace)
    metrics = compute_metrics(trace, scenario, args.window, args.tol)
    _emit(metrics.to_dict(), args.out_metrics)
    return 1 if metrics.failures else 0


def _cmd_report(args):
    scenario = load_scenario(args.scenario)
    trace = Trace.from_csv(args.trace)
    metrics = compute_metrics(trace, scenario, args.window, args.tol)
    _emit(metrics.to_dict(), args.out_metrics)
    return 1 if metrics.failures else 0


def _cmd_verify(args):
    params = load_hong_params(args.params)
    report = verify_assumptions(params, args.samples, args.seed)
    report["failures"] = [name for name, c in report["checks"].items() if c["failed"]]
    _emit(report, args.out_metrics)
    return 0 if report["ok"] else 1


def _cmd_accuracy(args):
    base = load_scenario(args.scenario)
    window = args.window or default_window(base.horizon)
    rows, failures = [], []
    for tau in args.taus:
        scenario = base.replace(tau=tau, record_stride=1)
        try:
            trace = simulate(scenario)
        except DivergenceError as exc:
            failures.append(f"divergence@tau={tau:g}")
            rows.append({"tau": tau, "diverged_at_step": exc.step})
            continue
        m = accuracy_metrics(trace, tau, window)
        rows.append({"tau": tau, "steady_sup": m.steady_sup, "accuracy_lambdas": m.accuracy_lambdas})
        if m.accuracy_lambdas is None:
            failures.append(f"not_converged@tau={tau:g}")
        elif args.bounds and any(l > b for l, b in zip(m.accuracy_lambdas, args.bounds)):
            failures.append(f"lambda_bound@tau={tau:g}")
    if not args.json:
        r = base.hong.r
        print("tau          " + "  ".join(f"{'lambda' + str(i + 1):>14}" for i in range(r)))
        for row in rows:
            lams = row.get("accuracy_lambdas")
            cells = [f"{x:14.6g}" for x in lams] if lams else ["-".rjust(14)] * r
            print(f"{row['tau']:<12.3g} " + "  ".join(cells))
    if args.json or args.out_metrics:
        _emit({"window": list(window), "rows": rows, "failures": failures}, args.out_metrics)
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="barrier-hosm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--window", type=_window, default=None, help="analysis window t0:t1")
        p.add_argument("--tol", type=float, default=1e-3, help="relative trap tolerance")
        p.add_argument("--out-metrics", default=None, help="write JSON here instead of stdout")

    p = sub.add_parser("simulate", help="run one scenario")
    p.add_argument("scenario")
    p.add_argument("--out-trace", default=None)
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="homogeneity and geometric-condition checks")
    p.add_argument("params")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-metrics", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("accuracy", help="sweep sampling steps and tabulate lambda_i")
    p.add_argument("scenario")
    p.add_argument("--taus", type=_floats, default=[1e-4, 1e-5])
    p.add_argument("--bounds", type=_floats, default=None, help="upper bounds on lambda_i")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    common(p)
    p.set_defaults(func=_cmd_accuracy)

    p = sub.add_parser("report", help="recompute metrics from a stored trace")
    p.add_argument("trace")
    p.add_argument("scenario")
    common(p)
    p.set_defaults(func=_cmd_report)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (HosmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())
