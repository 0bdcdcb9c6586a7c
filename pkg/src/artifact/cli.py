"""Command line entry point: ``artifact <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ArtifactError
from .endoscopy import EndoDatum, lie_lift, lie_stable_reps, stable_orbit_reps
from .harness.config import PROPERTY_SUITES, VerifyConfig
from .harness.report import Report, validate_report
from .harness.suites import replay_case, run_suite
from .lattice import set_cache_dir
from .matalg import EMatrix
from .orbital import orbit_integral_unit, orbit_integral_unit_lie
from .symspace import lift_from_herm

log = logging.getLogger("artifact")


def _datum(s: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a,b") from None
    return a, b


def _ints(s: str) -> list[int]:
    return [int(t) for t in s.split(",")]


def _common(sp: argparse.ArgumentParser, trials: int = 50):
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--precision", type=int, default=12, help="p-adic digits N")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--datum", type=_datum, default=(1, 1), help="a,b")
    sp.add_argument("--alpha", choices=["split", "nonsplit"], default="split")
    sp.add_argument("--beta", choices=["split", "nonsplit"], default="split")
    sp.add_argument("--trials", type=int, default=trials)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--window", type=int, default=None, help="fixed lattice window (default: automatic)")
    sp.add_argument("--out", type=Path, default=None, help="write the JSON report here")
    sp.add_argument("--cache-dir", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact", description=__doc__)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, hlp in [("verify-fl", "fundamental lemma on the group"),
                      ("verify-lie", "fundamental lemma on the Lie algebra"),
                      ("verify-descent", "descent identities on the descent locus")]:
        _common(sub.add_parser(name, help=hlp))
    sp = sub.add_parser("props", help="property suites")
    _common(sp, trials=None)
    sp.add_argument("--suites", default=",".join(PROPERTY_SUITES))
    sp = sub.add_parser("all", help="props, verify-fl, verify-lie and verify-descent in one report")
    _common(sp, trials=None)
    sp = sub.add_parser("orbit", help="orbital integrals of the unit element on a stable class")
    _common(sp)
    sp.add_argument("--roots", type=_ints, required=True, help="eigenvalues of R(x), comma separated")
    sp.add_argument("--lie", action="store_true")
    sp = sub.add_parser("replay", help="recompute cases from a report")
    sp.add_argument("report", type=Path)
    sp.add_argument("--case", default=None, help="suite:index (default: every failing case)")
    sp.add_argument("--out", type=Path, default=None)
    return ap


# per-suite trial counts used when --trials is not given
DEFAULT_TRIALS = {"cayley": 200, "tjd": 100, "lattice": 30, "oracle": 25, "fl": 50, "fl_lie": 50, "descent": 20}


def config_from_args(args, suites) -> VerifyConfig:
    a, b = args.datum
    n = args.n if args.n is not None else a + b
    trials = 50 if args.trials is None else args.trials
    return VerifyConfig(p=args.p, N=args.precision, n=n, datum=EndoDatum(a, b, args.alpha, args.beta),
                        trials=trials, seed=args.seed, window=args.window, suites=tuple(suites)).validate()


def _run_many(cfg: VerifyConfig, names, trials: int | None) -> Report:
    rep = Report(cfg.to_json())
    for name in names:
        rep.extend(run_suite(cfg, name, DEFAULT_TRIALS[name] if trials is None else trials))
    return rep


def _emit(rep: Report, out: Path | None) -> int:
    d = rep.to_json()
    validate_report(d)
    if out is not None:
        out.write_text(json.dumps(d, indent=1))
    s = d["summary"]
    for name, t in s["by_suite"].items():
        print(f"{name:10s} passed {t['passed']}/{t['total']}  failed {t['failed']}  errors {t['errors']}")
    print(f"total      passed {s['passed']}/{s['total']}  ({s['runtime']:.1f}s)")
    return 0 if rep.ok else 1


def _orbit(args) -> int:
    cfg = config_from_args(args, ())
    ctx = cfg.ctx()
    A = EMatrix.diag(ctx, args.roots)
    if args.lie:
        reps = lie_stable_reps(lie_lift(A))
        counts = [orbit_integral_unit_lie(d, cfg.window) for d in reps]
    else:
        reps = stable_orbit_reps(lift_from_herm(A))
        counts = [orbit_integral_unit(x, cfg.window) for x in reps]
    print(json.dumps({"roots": args.roots, "orbits": [r.to_json() for r in counts]}))
    return 0


def _replay(args) -> int:
    d = json.loads(args.report.read_text())
    validate_report(d)
    cases = d["cases"]
    if args.case:
        suite, idx = args.case.split(":")
        cases = [c for c in cases if c["suite"] == suite and c["index"] == int(idx)]
        if not cases:
            print(f"no case {args.case} in report", file=sys.stderr)
            return 2
    else:
        cases = [c for c in cases if c["verdict"] != "pass"]
    rep = Report(d["config"], [replay_case(c) for c in cases])
    for c in rep.cases:
        print(f"{c['suite']}:{c['index']} {c['verdict']}" + (f"  {c['error']}" if c["error"] else ""))
    return _emit(rep, args.out)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except ValueError as exc:
        ap.error(str(exc))
    except ArtifactError as exc:
        print(f"artifact: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if args.cmd == "replay":
        return _replay(args)
    if args.cache_dir is not None:
        set_cache_dir(args.cache_dir)
    if args.cmd == "orbit":
        return _orbit(args)
    if args.cmd in ("props", "all"):
        names = [s for s in args.suites.split(",") if s] if args.cmd == "props" else \
            list(PROPERTY_SUITES) + ["fl", "fl_lie", "descent"]
        cfg = config_from_args(args, names)
        return _emit(_run_many(cfg, names, args.trials), args.out)
    suite = {"verify-fl": "fl", "verify-lie": "fl_lie", "verify-descent": "descent"}[args.cmd]
    cfg = config_from_args(args, [suite])
    return _emit(run_suite(cfg, suite), args.out)


if __name__ == "__main__":
    sys.exit(main())
