"""Command-line front end: verification runs, density grids, raw samples.

Report documents are JSON with a ``header`` (timestamp, wall time) and a
``body``; the body is a pure function of the run configuration, so repeated
runs and different worker counts produce byte-identical bodies.

Exit codes: 0 all requested verifications pass, 1 verification failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, experiments, laws, pathkit
from .rng import make_stream

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIG = 2

SIM_SAMPLE_KINDS = ("pseudo_bridge", "hitting", "bessel", "cor2")


def _default_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("BRIDGELAW_SEED")
    return int(env) if env else 0


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _document(body: dict, wall_time: float) -> str:
    doc = {
        "header": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "wall_time": round(wall_time, 3),
        },
        "body": body,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def report_body_bytes(body: dict) -> bytes:
    """Canonical bytes of a report body (the determinism contract object)."""
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()


def _checks_csv(rows: list[tuple]) -> str:
    lines = ["experiment,check_id,kind,statistic,target,tolerance,p_value,verdict"]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _cmd_verify(args) -> int:
    name = args.name if args.name.startswith("verify_") else f"verify_{args.name}"
    budget = experiments.BUDGETS[args.budget]
    spec = experiments.ExperimentSpec(
        name=name,
        paths=args.paths if args.paths is not None else budget.paths,
        dt=args.dt if args.dt is not None else budget.dt,
        master_seed=_default_seed(args.seed),
        exact_n=args.exact_n if args.exact_n is not None else budget.exact_n,
    )
    try:
        report = experiments.run(spec, workers=args.workers)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    body = report.to_body()
    body["seed"] = spec.master_seed
    body["version"] = __version__
    if args.format == "csv":
        rows = [
            (report.name, c.id, c.kind, c.statistic, c.target, c.tolerance, c.p_value, c.verdict)
            for c in report.checks
        ]
        _write(_checks_csv(rows), args.out)
    else:
        _write(_document(body, report.wall_time), args.out)
    return EXIT_OK if report.overall == "pass" else EXIT_VERIFICATION_FAILED


def _cmd_verify_all(args) -> int:
    seed = _default_seed(args.seed)
    start = time.perf_counter()
    reports = experiments.run_all(seed, budget=args.budget, workers=args.workers)
    wall = time.perf_counter() - start
    verdict = experiments.global_verdict(reports)
    body = {
        "budget": args.budget,
        "seed": seed,
        "version": __version__,
        "reports": [rep.to_body() for rep in reports],
        "global": verdict,
    }
    if args.format == "csv":
        rows = [
            (rep.name, c.id, c.kind, c.statistic, c.target, c.tolerance, c.p_value, c.verdict)
            for rep in reports
            for c in rep.checks
        ]
        _write(_checks_csv(rows), args.out)
    else:
        _write(_document(body, wall), args.out)
    return EXIT_OK if verdict["overall"] == "pass" else EXIT_VERIFICATION_FAILED


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must be lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0.0 or hi <= lo:
        raise ValueError("grid must satisfy lo < hi and step > 0")
    n = int(math.floor((hi - lo) / step + 0.5))
    return lo + step * np.arange(n + 1)


def _cmd_density(args) -> int:
    try:
        law = laws.density_by_name(args.name, c=args.c)
        xs = _parse_grid(args.grid)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    step = xs[1] - xs[0] if len(xs) > 1 else 1.0
    # open-interval support endpoints are nudged inward by step/2
    lo, hi = law.support
    if math.isfinite(lo) and xs[0] == lo:
        xs[0] = lo + 0.5 * step
    if math.isfinite(hi) and xs[-1] == hi:
        xs[-1] = hi - 0.5 * step
    pdf = law.pdf_values(xs)
    cdf = law.cdf_values(xs)
    if args.format == "json":
        body = {
            "name": law.name,
            "x": [float(v) for v in xs],
            "pdf": [float(v) for v in pdf],
            "cdf": [float(v) for v in cdf],
        }
        _write(json.dumps(body, indent=2), args.out)
    else:
        lines = ["x,pdf,cdf"]
        for x, p, c in zip(xs, pdf, cdf):
            lines.append(f"{x:.17g},{p:.17g},{c:.17g}")
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_sample(args) -> int:
    seed = _default_seed(args.seed)
    kind = args.kind
    if kind in laws.REFERENCE_KINDS:
        data = laws.sample_reference_batch(kind, seed, experiments.stream_block("cli", kind),
                                           args.n, s=args.s)
    elif kind in SIM_SAMPLE_KINDS:
        scheme = pathkit.StepScheme(dt=args.dt)
        batch = pathkit.triplet_batch(
            seed, experiments.stream_block("cli", kind), args.n, scheme,
            workers=args.workers,
        )
        data = np.column_stack(batch.triplet(kind))
    else:
        print(
            f"error: unknown kind {kind!r}; reference kinds: {laws.REFERENCE_KINDS}, "
            f"simulated kinds: {SIM_SAMPLE_KINDS}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    arr = np.atleast_2d(np.asarray(data, dtype=float))
    if arr.shape[0] == 1 and args.n > 1:
        arr = arr.T
    cols = ["x", "y", "z"][: arr.shape[1]] if arr.ndim == 2 else ["x"]
    if args.format == "json":
        _write(json.dumps({"kind": kind, "columns": cols,
                           "values": [[float(v) for v in row] for row in arr]}, indent=2),
               args.out)
    else:
        lines = [",".join(cols)]
        for row in arr:
            lines.append(",".join(f"{v:.17g}" for v in row))
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgelaw",
        description="Verify distributional identities of Brownian path functionals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run one named verification")
    p_verify.add_argument("name", help="experiment name (with or without the verify_ prefix)")
    p_verify.add_argument("--paths", type=int, default=None)
    p_verify.add_argument("--dt", type=float, default=None)
    p_verify.add_argument("--exact-n", dest="exact_n", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--workers", type=int, default=1)
    p_verify.add_argument("--budget", choices=("quick", "full"), default="quick")
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.set_defaults(fn=_cmd_verify)

    p_all = sub.add_parser("verify-all", help="run the whole catalog")
    p_all.add_argument("--budget", choices=("quick", "full"), default="quick")
    p_all.add_argument("--seed", type=int, default=None)
    p_all.add_argument("--workers", type=int, default=1)
    p_all.add_argument("--out", default=None)
    p_all.add_argument("--format", choices=("json", "csv"), default="json")
    p_all.set_defaults(fn=_cmd_verify_all)

    p_dens = sub.add_parser("density", help="export a density grid as CSV/JSON")
    p_dens.add_argument("name")
    p_dens.add_argument("--grid", required=True, help="lo:hi:step")
    p_dens.add_argument("--c", type=float, default=0.5, help="family parameter where applicable")
    p_dens.add_argument("--out", default=None)
    p_dens.add_argument("--format", choices=("csv", "json"), default="csv")
    p_dens.set_defaults(fn=_cmd_density)

    p_sample = sub.add_parser("sample", help="emit exact reference or simulated draws")
    p_sample.add_argument("kind")
    p_sample.add_argument("-n", type=int, default=1000)
    p_sample.add_argument("--s", type=float, default=1.0, help="fixed time for factorization draws")
    p_sample.add_argument("--dt", type=float, default=1e-3)
    p_sample.add_argument("--seed", type=int, default=None)
    p_sample.add_argument("--workers", type=int, default=1)
    p_sample.add_argument("--out", default=None)
    p_sample.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sample.set_defaults(fn=_cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # join "--grid -5:1:0.01" so argparse does not read the value as a flag
    argv = list(argv)
    for i, token in enumerate(argv[:-1]):
        if token == "--grid" and argv[i + 1].startswith("-"):
            argv[i : i + 2] = [f"--grid={argv[i + 1]}"]
            break
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
