"""Command line front end: ``bilinear-lab <command> [options]``.

Exit status is 0 when every executed assertion passes, 1 on an assertion
failure and 2 on a configuration error.  Options may also come from a JSON
file given with ``--config``; flags on the command line take precedence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import checks
from . import exponents as ex
from .bochner_riesz import dyadic_profile_decomposition, kernel_decay_check
from .counterexamples import fit_scaling_exponent, run_scan, scan_summary, scan_to_csv
from .maximal import RadiusGrid
from .profiles import profile_corpus

__all__ = ["main", "run", "build_parser"]


class ConfigError(Exception):
    pass


def _fraction_list(text):
    try:
        return [Fraction(s.strip()) for s in str(text).split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc


def _int_list(text):
    try:
        return [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc


DEFAULTS = {
    "slice-check": {"d": 2, "order": 12, "n": 64, "pairs": 20, "format": "json"},
    "domination": {"d": 2, "n": 32, "pairs": 50, "order": 8, "format": "json"},
    "scan": {"family": "knapp", "d": 2, "deltas": "1/8,1/16,1/32,1/64", "ms": "-1,0,1,2",
             "p": "2", "q": "2", "r": "1", "format": "csv", "slope_tol": None},
    "br-reconstruct": {"alphas": "1/2,1,2", "J": 10, "format": "json"},
    "sqfn": {"mode": "both", "deltas": None, "format": "json"},
    "partition": {"delta": "1/8", "eps": "1/4", "n": 32, "format": "json"},
    "kernel": {"deltas": "1/8,1/16,1/32,1/64", "format": "json"},
    "classify": {"d": 2, "p": "2", "q": "2", "r": "1", "op": "global", "alpha": "0",
                 "format": "json"},
    "report": {"only": None, "format": "json"},
}


def build_parser():
    p = argparse.ArgumentParser(prog="bilinear-lab",
                                description="Bilinear spherical maximal function laboratory.")
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap (kernels are single-threaded; results do not depend on it)")
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--seed", type=int)
    sub = p.add_subparsers(dest="command", required=True)
    sp = lambda name, help_: sub.add_parser(name, help=help_, parents=[common],  # noqa: E731
                                            argument_default=argparse.SUPPRESS)

    def fmt(parser):
        parser.add_argument("--format", choices=("csv", "json"))

    s = sp("slice-check", "direct vs. sliced bilinear averages")
    s.add_argument("--d", type=int)
    s.add_argument("--order", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--pairs", type=int)
    fmt(s)

    s = sp("domination", "pointwise domination report")
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--pairs", type=int)
    s.add_argument("--order", type=int)
    fmt(s)

    s = sp("scan", "counterexample and scaling sweeps with slope fit")
    s.add_argument("--family", choices=("knapp", "annulus", "scaling"))
    s.add_argument("--d", type=int)
    s.add_argument("--deltas")
    s.add_argument("--ms", help="dyadic powers for the scaling family")
    s.add_argument("--p")
    s.add_argument("--q")
    s.add_argument("--r")
    s.add_argument("--slope-tol", dest="slope_tol", type=float)
    fmt(s)

    s = sp("br-reconstruct", "dyadic profile reconstruction residuals")
    s.add_argument("--alphas")
    s.add_argument("--J", type=int)
    fmt(s)

    s = sp("sqfn", "square function bounds and delta sweeps")
    s.add_argument("--mode", choices=("lo", "mixed", "both"))
    s.add_argument("--deltas")
    fmt(s)

    s = sp("partition", "multiplier partition identity")
    s.add_argument("--delta")
    s.add_argument("--eps")
    s.add_argument("--n", type=int)
    fmt(s)

    s = sp("kernel", "kernel decay constants across delta")
    s.add_argument("--deltas")
    fmt(s)

    s = sp("classify", "exponent verdicts")
    s.add_argument("--d", type=int)
    s.add_argument("--p")
    s.add_argument("--q")
    s.add_argument("--r")
    s.add_argument("--op", choices=("global", "local", "delta", "br"))
    s.add_argument("--alpha")
    fmt(s)

    s = sp("report", "aggregate of all acceptance checks")
    s.add_argument("--only", help="comma separated subset of checks")
    fmt(s)
    return p


def _options(ns):
    opts = dict(DEFAULTS[ns.command])
    if ns.config:
        try:
            with open(ns.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        section = cfg.get(ns.command, cfg)
        if "seed" in cfg:
            opts["seed"] = cfg["seed"]
        for k, v in section.items():
            key = k.replace("-", "_")
            if key in opts:
                opts[key] = v
            elif key == "seed":
                opts["seed"] = v
    for k, v in vars(ns).items():
        if k in opts and k != "seed":
            opts[k] = v
    if ns.seed is not None:
        opts["seed"] = ns.seed
    opts.setdefault("seed", 0)
    opts["threads"] = ns.threads
    return opts


def _emit(payload, fmt, out, rows=None):
    if fmt == "csv" and rows:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = list(rows[0].keys())
        w.writerow(keys)
        for row in rows:
            w.writerow([row[k] for k in keys])
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(payload, sort_keys=True, default=str) + "\n")


def _check_payload(res, opts):
    return {"check": res.name, "passed": bool(res.passed), "value": res.value,
            "tolerance": res.tolerance, "params": res.details, "seed": opts["seed"]}


def _cmd_slice(opts, out):
    res = checks.check_slicing(seed=opts["seed"], d=opts["d"], n=opts["n"],
                               order=opts["order"], n_random=opts["pairs"])
    payload = _check_payload(res, opts)
    payload["max_rel_error"] = res.value
    rows = [{"pair": k, "max_rel_error": repr(v), "d": opts["d"], "n": opts["n"],
             "order": opts["order"]} for k, v in res.details["per_pair"].items()]
    _emit(payload, opts["format"], out, rows)
    return res.passed


def _cmd_domination(opts, out):
    res = checks.check_domination(seed=opts["seed"], n_pairs=opts["pairs"], d=opts["d"],
                                  n=opts["n"], order=opts["order"])
    _emit(_check_payload(res, opts), opts["format"], out)
    return res.passed


def _exponent_point(opts):
    try:
        return ex.ExponentPoint.from_exponents(opts["d"], opts["p"], opts["q"], opts["r"])
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_scan(opts, out):
    fam, d = opts["family"], opts["d"]
    pt = _exponent_point(opts)
    try:
        if fam == "scaling":
            rng = np.random.default_rng(opts["seed"])
            n, L = 32, 8.0
            radii = RadiusGrid.global_dyadic(-3, 0, 8)
            margin = int(np.ceil(radii.max_radius / (L / n))) + 2
            pair = (checks.random_compact_function(rng, d, n, L, margin),
                    checks.random_compact_function(rng, d, n, L, margin))
            recs = run_scan("scaling", "bilinear", pt, _int_list(opts["ms"]),
                            base_pair=pair, radii=radii)
            target = float(d * (pt.ur - pt.up - pt.uq))
            tol = opts["slope_tol"] if opts["slope_tol"] is not None else 1e-6
        else:
            deltas = [float(x) for x in _fraction_list(opts["deltas"])]
            recs = run_scan(fam, "probe", pt, deltas, d=d)
            target = 2 * d - 1 if fam == "knapp" else 1.0
            tol = opts["slope_tol"] if opts["slope_tol"] is not None else (
                0.2 if fam == "knapp" else 0.15)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fit = fit_scaling_exponent(recs)
    ok = abs(fit.slope - target) <= tol
    if opts["format"] == "csv":
        out.write(scan_to_csv(recs, fit))
    else:
        summary = json.loads(scan_summary(recs, fit))
        summary.update({"target": target, "tolerance": tol, "passed": ok,
                        "records": [{"param": r.parameter, "statistic": r.ratio}
                                    for r in recs]})
        out.write(json.dumps(summary, sort_keys=True, default=str) + "\n")
    return ok


def _cmd_reconstruct(opts, out):
    rows, ok = [], True
    for a in _fraction_list(opts["alphas"]):
        try:
            dec = dyadic_profile_decomposition(float(a), int(opts["J"]))
            passed = dec.residual <= 2 * dec.bound
            rows.append({"alpha": float(a), "J": dec.J, "sup_error": dec.residual,
                         "bound": dec.bound, "passed": passed})
        except RuntimeError as exc:
            passed = False
            rows.append({"alpha": float(a), "J": opts["J"], "sup_error": None,
                         "bound": None, "passed": False, "error": str(exc)})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ok &= passed
    _emit({"check": "br-reconstruct", "results": rows, "passed": ok}, opts["format"], out,
          rows)
    return ok


def _cmd_sqfn(opts, out):
    payload, ok = {"check": "sqfn"}, True
    deltas = opts["deltas"] and [float(x) for x in _fraction_list(opts["deltas"])]
    if opts["mode"] in ("lo", "both"):
        res = checks.check_plancherel(seed=opts["seed"], deltas=deltas or None)
        payload["lo"] = _check_payload(res, opts)
        ok &= res.passed
    if opts["mode"] in ("mixed", "both"):
        res = checks.check_mixed_slope(seed=opts["seed"], deltas=deltas or None)
        payload["mixed"] = _check_payload(res, opts)
        ok &= res.passed
    payload["passed"] = ok
    _emit(payload, opts["format"], out)
    return ok


def _cmd_partition(opts, out):
    try:
        res = checks.check_partition(float(Fraction(str(opts["delta"]))),
                                     float(Fraction(str(opts["eps"]))), n=opts["n"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(_check_payload(res, opts), opts["format"], out)
    return res.passed


def _cmd_kernel(opts, out):
    deltas = [float(x) for x in _fraction_list(opts["deltas"])]
    phi = profile_corpus()[0]
    try:
        reps = [kernel_decay_check(phi, dl) for dl in deltas]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    consts = [r.constant for r in reps]
    ratios = [b / a for a, b in zip(consts, consts[1:])]
    ok = all(0.25 <= r <= 4 for r in ratios)
    rows = [json.loads(r.to_json()) for r in reps]
    _emit({"check": "kernel", "reports": rows, "ratios": ratios, "passed": ok},
          opts["format"], out, rows)
    return ok


def _cmd_classify(opts, out):
    op = opts["op"]
    try:
        if op == "delta":
            v = ex.delta_region(opts["d"], ex.reciprocal(opts["p"]), ex.reciprocal(opts["q"]))
        elif op == "br":
            v = ex.br_maximal_necessity(ex.to_fraction(opts["alpha"]),
                                        ex.reciprocal(opts["r"]), opts["d"])
        else:
            pt = _exponent_point(opts)
            v = ex.global_region(pt) if op == "global" else ex.localized_region(pt)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc
    payload = v.to_dict()
    payload.update({"d": opts["d"], "p": opts["p"], "q": opts["q"], "r": opts["r"], "op": op})
    _emit(payload, opts["format"], out, [payload])
    return True


def _cmd_report(opts, out):
    names = opts["only"].split(",") if opts["only"] else None
    if names and any(n not in checks.ALL_CHECKS for n in names):
        raise ConfigError(f"unknown check in {opts['only']!r}")
    results = checks.run_all(opts["seed"], names)
    if opts["format"] == "csv":
        rows = [{"check": r.name, "passed": r.passed, "value": repr(r.value),
                 "tolerance": r.tolerance} for r in results]
        _emit(None, "csv", out, rows)
    else:
        out.write(checks.results_json(results) + "\n")
    return all(r.passed for r in results)


COMMANDS = {
    "slice-check": _cmd_slice,
    "domination": _cmd_domination,
    "scan": _cmd_scan,
    "br-reconstruct": _cmd_reconstruct,
    "sqfn": _cmd_sqfn,
    "partition": _cmd_partition,
    "kernel": _cmd_kernel,
    "classify": _cmd_classify,
    "report": _cmd_report,
}


def run(argv=None, out=None):
    """Parse ``argv`` and execute; returns the exit code."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        opts = _options(ns)
        ok = COMMANDS[ns.command](opts, out)
    except ConfigError as exc:
        sys.stderr.write(json.dumps({"error": "config", "message": str(exc)}) + "\n")
        return 2
    if not ok:
        sys.stderr.write(json.dumps({"error": "assertion", "command": ns.command}) + "\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
