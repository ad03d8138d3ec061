"""Command-line front end.

Subcommands: ``generate``, ``upgrade``, ``degrade``, ``sweep`` and ``verify``.
Exit codes: 0 success, 1 a sweep run or a verification failed, 2 the input
could not be parsed, 3 a precondition of the algorithm does not hold.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .channels import GeneratorSpec
from .dist import read_channel, write_channel, write_joint_csv
from .errors import ChannelError
from .onehot_degrade import degrade
from .onehot_upgrade import upgrade
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3
SWEEP_HEADER = ["L_design", "L_actual", "delta_I", "bound", "mode", "q", "elapsed_ms"]
LN2 = math.log(2.0)


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def scale(units: str) -> float:
    """Factor applied to nats for display."""
    return 1.0 / LN2 if units == "bits" else 1.0


def load_source(args):
    """JointDistribution from ``--channel`` or ``--gen``."""
    if bool(args.channel) == bool(args.gen):
        raise CliError(EXIT_PARSE, "give exactly one of --channel and --gen")
    if args.channel:
        try:
            return read_channel(args.channel)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CliError(EXIT_PARSE, f"cannot read channel {args.channel}: {exc}") from exc
    try:
        spec = GeneratorSpec.parse(args.gen)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    if args.seed is not None and spec.kind == "random":
        spec = GeneratorSpec(spec.kind, spec.q, spec.param, args.seed)
    try:
        return spec.build()
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(EXIT_PRECONDITION if isinstance(exc, ChannelError) else EXIT_PARSE,
                       f"cannot build {args.gen}: {exc}") from exc


def run_mode(mode: str, joint, L: int):
    return upgrade(joint, L) if mode == "upgrade" else degrade(joint, L)


def write_json(doc, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def summary(result, units: str) -> str:
    k = scale(units)
    return f"delta_I={result.delta_I * k:.12g} bound={result.bound * k:.12g} L_actual={result.L_actual}"


# --- commands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    joint = load_source(args)
    if args.out:
        write_channel(joint, args.out)
    if args.csv:
        write_joint_csv(joint, args.csv)
    print(f"q={joint.q} outputs={joint.n}")
    return EXIT_OK


def _cmd_run(args, mode: str) -> int:
    joint = load_source(args)
    try:
        result = run_mode(mode, joint, args.L)
    except ChannelError as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    if args.out:
        doc = result.to_dict()
        doc["units"] = "nats"
        write_json(doc, args.out)
    if mode == "degrade" and args.quantizer:
        result.write_csv(args.quantizer, joint.output_labels)
    print(summary(result, args.units))
    return EXIT_OK


def cmd_upgrade(args) -> int:
    return _cmd_run(args, "upgrade")


def cmd_degrade(args) -> int:
    return _cmd_run(args, "degrade")


def sweep_point(mode: str, joint, L: int) -> dict:
    """One sweep row in nats; a failed run leaves the numeric fields empty."""
    t0 = time.perf_counter()
    try:
        r = run_mode(mode, joint, L)
    except ChannelError as exc:
        return {"L_design": L, "L_actual": None, "delta_I": None, "bound": None,
                "mode": mode, "q": joint.q, "elapsed_ms": None, "error": str(exc)}
    return {"L_design": L, "L_actual": r.L_actual, "delta_I": float(r.delta_I),
            "bound": float(r.bound), "mode": mode, "q": joint.q,
            "elapsed_ms": (time.perf_counter() - t0) * 1e3, "error": None}


def fit_slope(rows) -> float:
    """Least-squares slope of log(delta_I) against log(L_actual); nan with fewer than two points."""
    pts = [(math.log(r["L_actual"]), math.log(r["delta_I"])) for r in rows
           if r["delta_I"] is not None and r["delta_I"] > 0 and r["L_actual"] > 1]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        return float("nan")
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def parse_L_list(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return sorted({int(v) for v in text.split(",") if v.strip()})
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"bad L list {text!r}") from exc


def run_sweep(joint, mode: str, Ls, jobs: int = 1) -> list:
    if jobs > 1 and len(Ls) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_point, [mode] * len(Ls), [joint] * len(Ls), Ls))
    else:
        rows = [sweep_point(mode, joint, L) for L in Ls]
    return sorted(rows, key=lambda r: r["L_design"])


def write_sweep_csv(rows, path, units: str = "nats", timing: bool = True) -> None:
    k = scale(units)
    fmt = lambda v, f=1.0: "" if v is None else repr(float(v) * f)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for r in rows:
            w.writerow([r["L_design"], "" if r["L_actual"] is None else r["L_actual"],
                        fmt(r["delta_I"], k), fmt(r["bound"], k), r["mode"], r["q"],
                        fmt(r["elapsed_ms"]) if timing else ""])


def cmd_sweep(args) -> int:
    Ls = parse_L_list(args.L_list)
    joint = load_source(args) if Ls else None
    rows = run_sweep(joint, args.mode, Ls, args.jobs) if Ls else []
    out = args.out or "sweep.csv"
    write_sweep_csv(rows, out, args.units, not args.no_timing)
    failed = [r for r in rows if r["error"]]
    for r in failed:
        print(f"L={r['L_design']}: {r['error']}", file=sys.stderr)
    print(f"slope={fit_slope(rows):.6g} points={len(rows) - len(failed)}")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    caps = {}
    if args.max_n is not None:
        caps["max_n"] = args.max_n
    if args.count is not None:
        key = {"lemma": "points", "sphere": "vectors"}.get(args.suite, "count")
        caps[key] = args.count
    try:
        rep = run_suite(args.suite, args.seed if args.seed is not None else 1, **caps)
    except TypeError as exc:
        raise CliError(EXIT_PARSE, f"suite {args.suite} does not take these caps: {exc}") from exc
    print(f"suite={rep.suite} seed={rep.seed}")
    for line in rep.lines():
        print(line)
    if rep.failures:
        doc = json.dumps({"failures": rep.failures})
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc + "\n")
            print(f"offending instances written to {args.out}")
        else:
            print(doc)
    print("PASS" if rep.passed else "FAIL")
    return EXIT_OK if rep.passed else EXIT_FAIL


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chanquant",
                                description="Upgrade or degrade channels to a small output alphabet.")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--channel", help="channel JSON file")
        sp.add_argument("--gen", help="generator spec kind:q:param:seed")
        sp.add_argument("--seed", type=int, help="overrides the seed of a random generator spec")

    def units(sp):
        sp.add_argument("--units", choices=("nats", "bits"), default="nats")

    g = sub.add_parser("generate", help="write a generated channel as JSON")
    source(g)
    g.add_argument("--out", help="channel JSON path")
    g.add_argument("--csv", help="also export the joint as x,y,p CSV")
    g.set_defaults(func=cmd_generate)

    for name, func in (("upgrade", cmd_upgrade), ("degrade", cmd_degrade)):
        sp = sub.add_parser(name, help=f"{name} a channel to at most L outputs")
        source(sp)
        sp.add_argument("--L", type=int, required=True)
        units(sp)
        sp.add_argument("--out", help="result JSON path (values in nats)")
        if name == "degrade":
            sp.add_argument("--quantizer", help="quantizer CSV path")
        sp.set_defaults(func=func)

    s = sub.add_parser("sweep", help="run one mode over a list of budgets")
    source(s)
    s.add_argument("--mode", choices=("upgrade", "degrade"), required=True)
    s.add_argument("--L-list", dest="L_list", required=True, help="comma-separated budgets")
    units(s)
    s.add_argument("--out", help="CSV path (default sweep.csv)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--no-timing", action="store_true",
                   help="leave elapsed_ms empty so reruns are byte-identical")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run a seeded property suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--seed", type=int)
    v.add_argument("--max-n", dest="max_n", type=int, help="largest output alphabet")
    v.add_argument("--count", type=int, help="number of instances (grid points for lemma)")
    v.add_argument("--out", help="where to write offending instances")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
