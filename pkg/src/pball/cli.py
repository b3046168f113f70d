"""
Command-line front end.

    pball dist {pdf,cdf,quantile,sample,moment} ...
    pball geom {volume,dirichlet,shell,sample} ...
    pball mean --g EXPR ...
    pball concentrate --g EXPR ... [--out FILE]

Every subcommand accepts ``--config FILE.json``; its keys mirror the long
flag names (dashes or underscores) and explicit flags win over it.  With
``--format json`` the effective configuration is echoed into the output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dsl
from .ball_geometry import FIRST_QUADRANT, FULL, PBall, dirichlet_integral, pball_volume, sample_uniform_pball, shell_ratio
from .concentration import CUBE, CUBE_DERIVATIVE, ExperimentConfig, run_experiment
from .distributions import GenExponent, GenNormal, PNormOrder
from .meanvalue import cube_mean, exchange, mean_general


class CLIError(Exception):
    pass


def _fmt(v) -> str:
    v = float(v)
    if v == 0 or (1e-4 <= abs(v) < 1e15):
        return repr(round(v, 10))
    if not math.isfinite(v):
        return repr(v)
    return f"{v:.10g}"


def _csv_floats(text):
    return [float(s) for s in str(text).split(",") if s.strip()]


def _order(args) -> PNormOrder:
    if args.p0 is not None:
        return PNormOrder.ratio(args.p0, args.q0 if args.q0 is not None else 1)
    if args.p is not None:
        return PNormOrder(float(args.p))
    raise CLIError("an order is required: --p0/--q0 (parity-aware) or --p")


def _add_order(sp):
    sp.add_argument("--p", type=float, help="order p as a bare real (classified general-real)")
    sp.add_argument("--p0", type=int, help="numerator of p = p0/q0")
    sp.add_argument("--q0", type=int, help="denominator of p = p0/q0 (default 1)")


def _add_common(sp):
    sp.add_argument("--config", help="JSON file whose keys mirror the flags")
    sp.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    sp.add_argument("--seed", type=int, default=0)


def _echo(args):
    # where the output goes is not part of what was computed
    skip = {"func", "config", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, records, out):
    """records: list of dicts sharing the same keys."""
    if args.format == "json":
        json.dump({"config": _echo(args), "results": records}, out, indent=2, sort_keys=True)
        out.write("\n")
    elif args.format == "csv":
        keys = list(records[0].keys()) if records else []
        out.write(",".join(keys) + "\n")
        for r in records:
            out.write(",".join(_fmt(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys) + "\n")
    else:
        for r in records:
            out.write(_fmt(r["value"]) + "\n")


# dist -----------------------------------------------------------------------

def _law(args):
    order = _order(args)
    family = args.family or ("normal" if order.full_line else "exponent")
    if args.lam is not None and args.R is not None:
        raise CLIError("give either --R or --lambda, not both")
    if family == "normal":
        if args.lam is not None:
            raise CLIError("--lambda applies to the exponent family only")
        return GenNormal(order, 1.0 if args.R is None else args.R)
    if args.lam is not None:
        return GenExponent.from_rate(order, args.lam)
    return GenExponent(order, 1.0 if args.R is None else args.R)


def cmd_dist(args, out):
    law = _law(args)
    what = args.what
    if what in ("pdf", "cdf"):
        if args.x is None:
            raise CLIError(f"dist {what} needs --x")
        fn = law.pdf if what == "pdf" else law.cdf
        recs = [{"x": x, "value": float(fn(x))} for x in args.x]
    elif what == "quantile":
        if args.q is None:
            raise CLIError("dist quantile needs --q")
        recs = [{"q": q, "value": float(law.quantile(q))} for q in args.q]
    elif what == "moment":
        if args.k is None:
            raise CLIError("dist moment needs --k")
        recs = [{"k": args.k, "value": law.moment(args.k)}]
    else:
        rng = np.random.default_rng(args.seed)
        recs = [{"value": float(v)} for v in law.sample(rng, args.count)]
    _emit(args, recs, out)


# geom -----------------------------------------------------------------------

def cmd_geom(args, out):
    what = args.what
    if what == "dirichlet":
        if args.exponents is None:
            raise CLIError("geom dirichlet needs --exponents")
        recs = [{"value": dirichlet_integral(_csv_floats(args.exponents))}]
    elif what == "shell":
        if args.n is None or args.r is None:
            raise CLIError("geom shell needs --n and --r")
        recs = [{"value": shell_ratio(args.n, args.r, 1.0 if args.R is None else args.R)}]
    else:
        if args.n is None:
            raise CLIError(f"geom {what} needs --n")
        order = _order(args)
        region = args.region or (FULL if order.full_line else FIRST_QUADRANT)
        ball = PBall(args.n, order, 1.0 if args.R is None else args.R, region)
        if what == "volume":
            recs = [{"value": pball_volume(ball)}]
        else:
            pts = sample_uniform_pball(ball, np.random.default_rng(args.seed), args.count)
            if args.format == "json":
                recs = [{"point": [float(v) for v in row]} for row in pts]
            else:
                for row in pts:
                    out.write(" ".join(repr(float(v)) for v in row) + "\n")
                return
    if args.format == "json" or what != "sample":
        _emit(args, recs, out)


# mean -----------------------------------------------------------------------

def _specs(args):
    if not args.g:
        raise CLIError("--g is required")
    ivs = dsl.parse_intervals(args.intervals) if args.intervals else None
    return [dsl.functional(g, ivs) for g in args.g]


def cmd_mean(args, out):
    specs = _specs(args)
    results = []
    if args.region == CUBE:
        a = 0.0 if args.a is None else args.a
        b = 1.0 if args.b is None else args.b
        for s in specs:
            if s.uses_t or s.m > 1:
                raise CLIError("cube mean-values take an integrand in x1 only")
            r = cube_mean(s.integrand, a, b, args.mode)
            results.append((s, r))
    else:
        order = _order(args)
        R = 1.0 if args.R is None else args.R
        for s in specs:
            r = mean_general(s, order, R, args.region, method=args.method, seed=args.seed)
            results.append((s, r))
    recs = [
        {"g": str(s), "value": r.value, "method": r.method, "error_estimate": r.error_estimate,
         "evaluations": r.evaluations}
        for s, r in results
    ]
    if args.h:
        recs.append({"g": "h: " + args.h, "value": exchange(args.h, [r.value for _, r in results]),
                     "method": "exchange", "error_estimate": float("nan"), "evaluations": 0})
    _emit(args, recs, out)


# concentrate ----------------------------------------------------------------

def cmd_concentrate(args, out):
    specs = _specs(args)
    order = None
    if args.region in (FULL, FIRST_QUADRANT, None):
        order = _order(args)
    region = args.region or (FULL if order.full_line else FIRST_QUADRANT)
    cfg = ExperimentConfig(
        g=specs,
        order=order,
        R=1.0 if args.R is None else args.R,
        region=region,
        a=0.0 if args.a is None else args.a,
        b=1.0 if args.b is None else args.b,
        h=args.h,
        n_grid=tuple(int(v) for v in _csv_floats(args.n_grid)),
        samples_per_n=args.samples,
        seed=args.seed,
        chunk_size=args.chunk_size,
        max_tuples=args.max_tuples,
        apply_to=args.apply_to,
        workers=args.workers,
    )
    report = run_experiment(cfg)
    if args.format == "json":
        d = report.to_dict()
        d["cli"] = _echo(args)
        text = json.dumps(d, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        text = report.to_csv()
    else:
        text = "".join(f"{r.n} {_fmt(r.mean)} {r.variance!r} {r.stderr!r}\n" for r in report.rows)
    if args.out:
        Path(args.out).write_text(text)
        out.write(report.summary() + "\n")
    else:
        out.write(text)
        if args.format == "plain":
            out.write(report.summary() + "\n")


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pball", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", help="high-order normal / exponent laws")
    d.add_argument("what", choices=("pdf", "cdf", "quantile", "sample", "moment"))
    _add_order(d)
    d.add_argument("--R", type=float)
    d.add_argument("--lambda", dest="lam", type=float, help="rate in exp(-lambda x^p)")
    d.add_argument("--family", choices=("normal", "exponent"), help="override the parity routing")
    d.add_argument("--x", type=float, nargs="+")
    d.add_argument("--q", type=float, nargs="+")
    d.add_argument("--k", type=int)
    d.add_argument("--count", type=int, default=1)
    _add_common(d)
    d.set_defaults(func=cmd_dist)

    g = sub.add_parser("geom", help="p-ball volumes, Dirichlet integrals, shells, sampling")
    g.add_argument("what", choices=("volume", "dirichlet", "shell", "sample"))
    g.add_argument("--n", type=int)
    _add_order(g)
    g.add_argument("--R", type=float)
    g.add_argument("--r", type=float)
    g.add_argument("--region", choices=(FULL, FIRST_QUADRANT))
    g.add_argument("--exponents", help="comma-separated, e.g. 1,1")
    g.add_argument("--count", type=int, default=1)
    _add_common(g)
    g.set_defaults(func=cmd_geom)

    m = sub.add_parser("mean", help="exact mean-values of integral functionals")
    m.add_argument("--g", action="append", help="integrand; repeat for several functionals")
    m.add_argument("--h", help="outer function of y1..ym for the exchange formula")
    _add_order(m)
    m.add_argument("--R", type=float)
    m.add_argument("--region", choices=(FULL, FIRST_QUADRANT, CUBE))
    m.add_argument("--intervals", help="'a1,b1;a2,b2'")
    m.add_argument("--a", type=float)
    m.add_argument("--b", type=float)
    m.add_argument("--mode", choices=("value", "derivative"), default="value")
    m.add_argument("--method", choices=("auto", "quadrature", "mc"), default="auto")
    _add_common(m)
    m.set_defaults(func=cmd_mean)

    c = sub.add_parser("concentrate", help="Monte-Carlo concentration experiment")
    c.add_argument("--g", action="append", help="integrand; repeat for several functionals")
    c.add_argument("--h", help="outer function of y1..ym")
    _add_order(c)
    c.add_argument("--R", type=float)
    c.add_argument("--region", choices=(FULL, FIRST_QUADRANT, CUBE, CUBE_DERIVATIVE))
    c.add_argument("--a", type=float)
    c.add_argument("--b", type=float)
    c.add_argument("--apply-to", choices=("derivative", "path"), default="derivative")
    c.add_argument("--intervals", help="'a1,b1;a2,b2'")
    c.add_argument("--n-grid", default="16,64,256,1024")
    c.add_argument("--samples", type=int, default=20000)
    c.add_argument("--chunk-size", type=int, default=1000)
    c.add_argument("--max-tuples", type=int, default=10000)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", help="write the report here; the summary line goes to stdout")
    _add_common(c)
    c.set_defaults(func=cmd_concentrate)

    parser._subs = {"dist": d, "geom": g, "mean": m, "concentrate": c}
    return parser


def _apply_config(parser, argv):
    """Load --config (if any) into the chosen subparser's defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    cmd = next((a for a in argv if a in parser._subs), None)
    if cmd is None:
        return {}
    with open(known.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise CLIError("config file must hold a JSON object")
    sp = parser._subs[cmd]
    dests = {a.dest for a in sp._actions}
    defaults = {}
    late = {}
    for key, val in data.items():
        dest = {"lambda": "lam"}.get(key, key.replace("-", "_"))
        if dest not in dests:
            raise CLIError(f"unknown config key {key!r} for '{cmd}'")
        if dest == "g":
            # append-style flag: the config value must be replaced, not extended
            late[dest] = [val] if isinstance(val, str) else list(val)
            continue
        if dest in ("x", "q") and not isinstance(val, list):
            val = [val]
        defaults[dest] = val
    sp.set_defaults(**defaults)
    return late


def main(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        late = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        for dest, val in late.items():
            if getattr(args, dest, None) is None:
                setattr(args, dest, val)
        args.func(args, out)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (CLIError, ValueError, ArithmeticError, OSError) as exc:
        err.write(f"pball: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
