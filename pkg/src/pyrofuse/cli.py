"""Command-line entry point.

Every flag can also be set through an environment variable named
``PYROFUSE_`` followed by the flag's destination in upper case, e.g.
``PYROFUSE_TRIALS=500`` or ``PYROFUSE_P_STEP=0.01``. Explicit flags win.

Data files are written exactly as requested; the run manifest goes to a
``<out>.manifest.json`` sidecar so the data itself stays byte-reproducible.

Exit codes: 0 success, 1 failed scenario or no threshold crossing, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from . import lattice as lattice_mod
from .lattice import LatticeSpec
from .montecarlo import TABLE1, SweepSpec, estimate_threshold, sweep, table_scan
from .percolation import PAIRINGS

ENV_PREFIX = "PYROFUSE_"
CSV_SCHEMA_VERSION = 1
SWEEP_HEADER = "p,nx,ny,nz,trials,spanning_count,spanning_prob,ci_lo,ci_hi,mean_span_fraction"
TABLE1_HEADER = (
    "nx,ny,nz,Q,p,trials,spanning_count,spanning_prob,ci_lo,ci_hi,"
    "mean_span_fraction,reported_prob"
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _f(x: float) -> str:
    return f"{x:.6f}"


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {s}")
    return v


def _prob(s: str) -> float:
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {s}")
    return v


def _bool(s: str) -> bool:
    return s.strip().lower() in ("1", "true", "yes", "on")


def _lattice_args(p: argparse.ArgumentParser, default: int | None = None):
    for axis in ("nx", "ny", "nz"):
        p.add_argument(f"--{axis}", type=_positive_int, default=default, required=default is None)


def _mc_args(p: argparse.ArgumentParser, trials: int):
    p.add_argument("--trials", type=_positive_int, default=trials)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--pairing", choices=PAIRINGS, default="fixed")
    p.add_argument("--site-deletion-prob", type=_prob, default=None,
                   help="override the default site deletion probability 1 - p^2")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pyrofuse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-fusion", help="run the fusion scenarios and lattice-rule certifications")
    p.add_argument("--out", default=None, help="JSON report path")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("build-lattice", help="build a lattice and dump it as JSON")
    _lattice_args(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("sweep", help="spanning probability over a grid of p")
    _lattice_args(p)
    p.add_argument("--p-min", type=_prob, default=0.0)
    p.add_argument("--p-max", type=_prob, default=1.0)
    p.add_argument("--p-step", type=float, default=0.05)
    p.add_argument("--coupled", action="store_true", help="share each trial's draws across p")
    _mc_args(p, trials=200)

    p = sub.add_parser("threshold", help="0.5 crossing of the spanning curve")
    _lattice_args(p, default=12)
    p.add_argument("--p-lo", type=_prob, default=0.6)
    p.add_argument("--p-hi", type=_prob, default=0.8)
    p.add_argument("--resolution", type=float, default=0.002)
    _mc_args(p, trials=400)

    p = sub.add_parser("table1", help="spanning statistics on the reference lattice sizes")
    p.add_argument("--p", type=_prob, default=0.75)
    _mc_args(p, trials=200)
    return parser


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def apply_env_defaults(parser: argparse.ArgumentParser, environ=os.environ):
    """Turn ``PYROFUSE_<DEST>`` variables into subcommand defaults."""
    for sp in _subparsers(parser).values():
        for action in sp._actions:
            if not action.option_strings or action.dest in ("help",):
                continue
            raw = environ.get(ENV_PREFIX + action.dest.upper())
            if raw is None:
                continue
            try:
                if isinstance(action, argparse._StoreTrueAction):
                    value = _bool(raw)
                elif action.type is not None:
                    value = action.type(raw)
                else:
                    value = raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{ENV_PREFIX}{action.dest.upper()}: {exc}") from None
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"{ENV_PREFIX}{action.dest.upper()} must be one of {list(action.choices)}")
            action.default = value
            action.required = False


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "quiet")}


def write_manifest(path: str, args, schema: str | None):
    manifest = {
        "command": args.command,
        "parameters": _params(args),
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "output": os.path.basename(path),
    }
    if schema is not None:
        manifest["csv_schema_version"] = CSV_SCHEMA_VERSION
        manifest["csv_header"] = schema
    with open(path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(text: str, args, schema: str | None):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        write_manifest(args.out, args, schema)
    else:
        sys.stdout.write(text)


def cmd_verify_fusion(args) -> int:
    from .fusion_rules import verify_all

    report = verify_all()
    if not args.quiet:
        print(report.table())
        print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
        write_manifest(args.out, args, None)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_build_lattice(args) -> int:
    lat = lattice_mod.build(LatticeSpec(args.nx, args.ny, args.nz))
    if args.out:
        lattice_mod.dump(lat, args.out)
        write_manifest(args.out, args, None)
    print(lat.site_count)
    return EXIT_OK


def sweep_csv(result) -> str:
    s = result.spec.spec
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for row in sorted(result.rows, key=lambda r: r.p):
        lo, hi = row.ci
        buf.write(",".join([
            _f(row.p), str(s.n_x), str(s.n_y), str(s.n_z), str(row.trials), str(row.spanning_count),
            _f(row.spanning_prob), _f(lo), _f(hi), _f(row.mean_spanning_fraction),
        ]) + "\n")
    return buf.getvalue()


def cmd_sweep(args) -> int:
    try:
        spec = SweepSpec(
            LatticeSpec(args.nx, args.ny, args.nz), args.p_min, args.p_max, args.p_step,
            args.trials, seed=args.seed, pairing=args.pairing, coupled=args.coupled,
            site_deletion_prob=args.site_deletion_prob,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(sweep_csv(sweep(spec, threads=args.threads)), args, SWEEP_HEADER)
    return EXIT_OK


def cmd_threshold(args) -> int:
    if not args.p_lo < args.p_hi:
        raise UsageError("need --p-lo < --p-hi")
    if args.resolution <= 0:
        raise UsageError("--resolution must be positive")
    res = estimate_threshold(
        LatticeSpec(args.nx, args.ny, args.nz), args.trials, args.p_lo, args.p_hi, args.resolution,
        seed=args.seed, pairing=args.pairing, site_deletion_prob=args.site_deletion_prob,
        threads=args.threads,
    )
    out = {
        "crossed": res.crossed,
        "p_star": None if res.p_star is None else round(res.p_star, 6),
        "bracket": [None if b is None else round(b, 6) for b in res.bracket],
        "trials": res.trials,
        "points": [[round(p, 6), c] for p, c in res.points],
    }
    if res.crossed:
        lo, hi = (_f(b) if b is not None else "none" for b in res.bracket)
        print(f"p_star {_f(res.p_star)}")
        print(f"bracket {lo} {hi}")
    else:
        print(f"no crossing in [{_f(args.p_lo)}, {_f(args.p_hi)}]")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(args.out, args, None)
    return EXIT_OK if res.crossed else EXIT_FAIL


def table1_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(TABLE1_HEADER + "\n")
    for r in rows:
        lo, hi = r.ci
        ref = "" if r.reported_probability is None else f"{r.reported_probability:.2f}"
        buf.write(",".join([
            str(r.spec.n_x), str(r.spec.n_y), str(r.spec.n_z), str(r.site_count), _f(r.p), str(r.trials),
            str(r.spanning_count), _f(r.spanning_prob), _f(lo), _f(hi), _f(r.mean_spanning_fraction), ref,
        ]) + "\n")
    return buf.getvalue()


def cmd_table1(args) -> int:
    rows = table_scan(
        [LatticeSpec(*r[:3]) for r in TABLE1], p=args.p, trials=args.trials, seed=args.seed,
        pairing=args.pairing, site_deletion_prob=args.site_deletion_prob, threads=args.threads,
    )
    _emit(table1_csv(rows), args, TABLE1_HEADER)
    return EXIT_OK


COMMANDS = {
    "verify-fusion": cmd_verify_fusion,
    "build-lattice": cmd_build_lattice,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "table1": cmd_table1,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        apply_env_defaults(parser)
    except UsageError as exc:
        print(f"pyrofuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pyrofuse {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pyrofuse {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
