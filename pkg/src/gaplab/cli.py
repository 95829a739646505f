"""Command-line front door for the lab.

Subcommands map one-to-one onto experiment drivers and spectral one-shots:

    sample    emit Haar tuples as quaternion rows
    spectrum  per-level top eigenvalues for one tuple (CSV to stdout)
    gap       per-level gap bounds, optionally with the min-max optimizer
    scan      zero_one_scan experiment (record file + summary line)
    orbit     orbit_invariance experiment
    charvar   level_set_walk experiment
    lps       lps_benchmark experiment

Every command is a pure function of its flags: seeds are mandatory wherever
randomness enters (no wall-clock seeding), rows are emitted in deterministic
order whatever the worker count, and reruns produce byte-identical primary
output.  CSV rows go to stdout; summaries are single JSON lines on stderr or
in ``--out``; record files follow the lab's JSONL layout.

Exit codes: 0 success, 2 input/config error, 3 numerical failure, 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .charvar import LevelSetSamplingError
from .group import GroupElement, GroupTuple, haar_sample, haar_tuple
from .lab import (
    ExperimentConfig,
    json_line,
    lps_preset,
    run_experiment,
)
from .spectral import EigensolverError, lambda1_estimate, level_gap_bounds, \
    minmax_gap_estimate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class CliError(Exception):
    """Input or configuration problem; maps to exit code 2."""


def _fmt17(v: float) -> str:
    return format(float(v), ".17g")


def read_tuple_file(path) -> GroupTuple:
    """Parse a tuple file: one generator per line, four fields w x y z.

    Blank lines and '#' comments are skipped; rows must be unit quaternions
    to within 1e-9 (then renormalized).
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read tuple file {path}: {e}") from e
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 4:
            raise CliError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        try:
            w, x, y, z = (float(p) for p in parts)
        except ValueError as e:
            raise CliError(f"{path}:{lineno}: {e}") from e
        norm = (w * w + x * x + y * y + z * z) ** 0.5
        if abs(norm - 1.0) > 1e-9:
            raise CliError(f"{path}:{lineno}: row is not a unit quaternion "
                           f"(norm {norm:.12g})")
        rows.append(GroupElement(w, x, y, z))
    if len(rows) < 2:
        raise CliError(f"{path}: a tuple file needs at least 2 rows")
    return GroupTuple(rows)


def _resolve_tuple(args) -> GroupTuple:
    sources = [args.tuple_file is not None, args.seed is not None,
               getattr(args, "lps", False)]
    if sum(sources) != 1:
        raise CliError("choose exactly one tuple source: --tuple-file, --seed, "
                       "or --lps")
    if getattr(args, "lps", False):
        return lps_preset()
    if args.tuple_file is not None:
        return read_tuple_file(args.tuple_file)
    if args.n is None:
        raise CliError("--n is required with --seed")
    return haar_tuple(np.random.default_rng(args.seed), args.n)


def _emit_summary(args, summary: dict):
    line = json_line(summary)
    if getattr(args, "out", None):
        try:
            Path(args.out).write_text(line + "\n")
        except OSError as e:
            raise OSError(f"cannot write summary to {args.out}: {e}") from e
    else:
        print(line, file=sys.stderr)


def cmd_sample(args) -> int:
    if args.n < 2:
        raise CliError("--n must be >= 2")
    if args.count < 1:
        raise CliError("--count must be >= 1")
    rng = np.random.default_rng(args.seed)
    blocks = []
    for _ in range(args.count):
        rows = [" ".join(_fmt17(c) for c in haar_sample(rng).coords())
                for _ in range(args.n)]
        blocks.append("\n".join(rows))
    sys.stdout.write("\n\n".join(blocks) + "\n")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    t = _resolve_tuple(args)
    report = lambda1_estimate(t, args.cutoff)
    for k, lam in report.per_level:
        print(f"{k},{_fmt17(lam)}")
    summary = {
        "n": len(t),
        "cutoff_J": report.cutoff_J,
        "lambda1_J": report.lambda1_J,
        "gap_proxy": report.gap_proxy,
    }
    if args.lps:
        summary["margin"] = 2.0 * 5.0 ** 0.5 - report.lambda1_J
    _emit_summary(args, summary)
    return EXIT_OK


def cmd_gap(args) -> int:
    t = _resolve_tuple(args)
    if (args.level is None) == (args.cutoff is None):
        raise CliError("choose exactly one of --level and --cutoff")
    levels = [args.level] if args.level is not None else list(
        range(1, args.cutoff + 1))
    for k in levels:
        if args.minmax:
            lg = minmax_gap_estimate(t, k, restarts=args.restarts,
                                     iters=args.iters)
            tail = _fmt17(lg.minmax_estimate)
        else:
            lg = level_gap_bounds(t, k)
            tail = ""
        print(f"{k},{_fmt17(lg.lambda_max)},{_fmt17(lg.lower)},"
              f"{_fmt17(lg.upper)},{tail}")
    return EXIT_OK


def _run_and_report(config: ExperimentConfig, args) -> int:
    try:
        record = run_experiment(config, out_dir=args.out_dir,
                                threads=args.threads, resume=args.resume)
    except OSError as e:
        raise OSError(
            f"{e}; the partial record file is intact, rerun with the same "
            f"flags plus --resume to continue") from e
    print(json_line({"summary": record.summary}))
    print(f"record: {record.path}", file=sys.stderr)
    return EXIT_OK


def cmd_scan(args) -> int:
    config = ExperimentConfig(kind="zero_one_scan", n=args.n, seed=args.seed,
                              cutoff_J=args.cutoff, samples=args.samples,
                              threshold=args.threshold)
    return _run_and_report(config, args)


def cmd_orbit(args) -> int:
    config = ExperimentConfig(kind="orbit_invariance", n=args.n,
                              seed=args.seed, cutoff_J=args.cutoff,
                              walk_length=args.walk,
                              threshold=args.threshold)
    return _run_and_report(config, args)


def cmd_charvar(args) -> int:
    config = ExperimentConfig(kind="level_set_walk", n=2, seed=args.seed,
                              cutoff_J=args.cutoff, samples=args.samples,
                              walk_length=args.walk, threshold=args.threshold,
                              target=args.target, tol=args.tol,
                              max_tries=args.max_tries)
    return _run_and_report(config, args)


def cmd_lps(args) -> int:
    config = ExperimentConfig(kind="lps_benchmark", n=3, seed=args.seed,
                              cutoff_J=args.cutoff)
    return _run_and_report(config, args)


def _default_threads() -> int:
    env = os.environ.get("GAPLAB_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    def __init__(self, prog):
        super().__init__(prog, width=78)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaplab",
        description="Spectral-gap laboratory for tuples of rotations.",
        formatter_class=_Formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, formatter_class=_Formatter,
                           description=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("sample", cmd_sample, "Emit Haar-random tuples as quaternion rows.")
    p.add_argument("--n", type=int, required=True, help="int: tuple rank")
    p.add_argument("--count", type=int, required=True,
                   help="int: number of tuples")
    p.add_argument("--seed", type=int, required=True, help="int: random seed")

    p = add("spectrum", cmd_spectrum,
            "Per-level top eigenvalues 'k,lambda_max' for one tuple.")
    p.add_argument("--n", type=int, help="int: rank for --seed tuples")
    p.add_argument("--cutoff", type=int, required=True,
                   help="int: sweep levels k = 1..cutoff")
    p.add_argument("--seed", type=int, help="int: Haar tuple seed")
    p.add_argument("--tuple-file", help="path: tuple file (w x y z rows)")
    p.add_argument("--lps", action="store_true",
                   help="use the (1+2i)/sqrt5-type preset (n=3)")
    p.add_argument("--out", help="path: write the summary JSON line here "
                                 "instead of stderr")

    p = add("gap", cmd_gap,
            "Per-level gap rows 'k,lambda_max,lower,upper,minmax'.")
    p.add_argument("--n", type=int, help="int: rank for --seed tuples")
    p.add_argument("--seed", type=int, help="int: Haar tuple seed")
    p.add_argument("--tuple-file", help="path: tuple file (w x y z rows)")
    p.add_argument("--level", type=int, help="int: single level k")
    p.add_argument("--cutoff", type=int, help="int: sweep levels 1..cutoff")
    p.add_argument("--minmax", action="store_true",
                   help="run the min-max optimizer per level")
    p.add_argument("--restarts", type=int, default=16,
                   help="int: optimizer restarts")
    p.add_argument("--iters", type=int, default=300,
                   help="int: optimizer iterations per restart")

    def add_experiment(name, fn, help_text):
        p = add(name, fn, help_text)
        p.add_argument("--seed", type=int, required=True,
                       help="int: root seed (mandatory; no wall-clock seeding)")
        p.add_argument("--out-dir", default=".",
                       help="path: directory for the record file")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help="int: worker threads (env GAPLAB_THREADS)")
        p.add_argument("--resume", action="store_true",
                       help="continue a partial record file")
        return p

    p = add_experiment("scan", cmd_scan,
                       "Zero-one scan: Haar tuples, cutoff spectra, gap "
                       "indicator distribution.")
    p.add_argument("--n", type=int, required=True, help="int: tuple rank")
    p.add_argument("--cutoff", type=int, default=40,
                   help="int: level cutoff J")
    p.add_argument("--samples", type=int, required=True,
                   help="int: number of Haar tuples")
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="float: gap indicator threshold")

    p = add_experiment("orbit", cmd_orbit,
                       "Random Nielsen walk from one Haar tuple; invariance "
                       "and stability checks.")
    p.add_argument("--n", type=int, required=True, help="int: tuple rank")
    p.add_argument("--walk", type=int, required=True,
                   help="int: number of moves")
    p.add_argument("--cutoff", type=int, default=6, help="int: level cutoff J")
    p.add_argument("--threshold", type=float, default=1e-3,
                   help="float: gap indicator threshold")

    p = add_experiment("charvar", cmd_charvar,
                       "Pairs on one commutator-trace fiber plus a fiber "
                       "walk (n=2).")
    p.add_argument("--target", type=float, required=True,
                   help="float: fiber trace target in (-2, 2)")
    p.add_argument("--tol", type=float, required=True,
                   help="float: rejection band half-width")
    p.add_argument("--samples", type=int, required=True,
                   help="int: fiber samples")
    p.add_argument("--walk", type=int, default=1000,
                   help="int: fiber walk steps")
    p.add_argument("--cutoff", type=int, default=6, help="int: level cutoff J")
    p.add_argument("--threshold", type=float, default=0.1,
                   help="float: gap indicator threshold")
    p.add_argument("--max-tries", type=int, default=1_000_000,
                   help="int: rejection budget per sample")

    p = add_experiment("lps", cmd_lps,
                       "Per-level spectra of the (1+2i)/sqrt5-type preset "
                       "against the 2*sqrt(5) edge.")
    p.add_argument("--cutoff", type=int, default=24, help="int: level cutoff J")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (EigensolverError, LevelSetSamplingError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
