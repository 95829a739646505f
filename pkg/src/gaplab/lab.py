"""Seeded, resumable Monte Carlo experiment drivers with persisted records.

Experiments
-----------

zero_one_scan     Haar tuples; per-sample cutoff spectra, gap proxies, and
                  the gap indicator.  Reports distributions, never a verdict:
                  the gapped/ungapped dichotomy is a measure-one statement
                  outside numerical reach, so the output is labeled
                  finite-cutoff evidence.
orbit_invariance  one Haar start tuple pushed along a random Nielsen walk;
                  records the gap proxy, the indicator, the per-move
                  generating-set constant L with the quantitative stability
                  check  gap(after) >= gap(before) / (n L^2) - 1e-6, and (for
                  pairs) the commutator trace, whose drift along the orbit
                  should be roundoff only.
level_set_walk    pairs sampled on one commutator-trace fiber by rejection,
                  with per-pair gap data, plus a spectra-free walk on the
                  fiber; the summary compares the walk's x-trace distribution
                  to the fiber samples (KS) and reports the indicator's
                  distribution across the fiber.
lps_benchmark     the preset tuple of quaternions (1+2i)/sqrt5, (1+2j)/sqrt5,
                  (1+2k)/sqrt5; per-level top eigenvalues against the
                  reference edge 2*sqrt(5).

Reproducibility
---------------

Row i draws its random stream from a counter-based 64-bit mix of (root seed,
experiment kind, i), so rows are independent tasks and results are identical
for any execution order or worker count.  Record files are JSON lines: line 1
the config, one line per row, and a final summary line; floats are written
with 17 significant digits so parsed values round-trip exactly.  A run
interrupted after r rows can be resumed against the partial file and yields
the same rows as an uninterrupted run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__ as ARTIFACT_VERSION
from .charvar import commutator_trace, sample_level_set_counted, trace_coords
from .group import GroupElement, GroupTuple, haar_tuple, trace, tuple_digest
from .nielsen import apply_move, random_walk, word_length_bound
from .spectral import (
    DEFAULT_THRESHOLD,
    EigensolverError,
    averaging_operator,
    lambda1_estimate,
    lambda_max,
    pgap_from_report,
)

KINDS = ("zero_one_scan", "orbit_invariance", "level_set_walk", "lps_benchmark")

_STABILITY_SLACK = 1e-6


def lps_preset() -> GroupTuple:
    """The tuple of quaternions (1+2i)/sqrt5, (1+2j)/sqrt5, (1+2k)/sqrt5."""
    s, r = 1.0 / math.sqrt(5.0), 2.0 / math.sqrt(5.0)
    return GroupTuple([
        GroupElement(s, r, 0.0, 0.0),
        GroupElement(s, 0.0, r, 0.0),
        GroupElement(s, 0.0, 0.0, r),
    ])


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int
    seed: int
    cutoff_J: int = 40
    samples: int = 0
    walk_length: int = 0
    threshold: float = DEFAULT_THRESHOLD
    target: float = 0.0
    tol: float = 0.05
    max_tries: int = 1_000_000

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.cutoff_J < 1:
            raise ValueError("cutoff_J must be >= 1")
        if self.threshold <= 0.0:
            raise ValueError("threshold must be positive")
        if self.kind == "zero_one_scan" and self.samples < 1:
            raise ValueError("zero_one_scan needs samples >= 1")
        if self.kind == "orbit_invariance" and self.walk_length < 1:
            raise ValueError("orbit_invariance needs walk_length >= 1")
        if self.kind == "level_set_walk":
            if self.n != 2:
                raise ValueError("level_set_walk is defined for n = 2")
            if self.samples < 1 or self.walk_length < 1:
                raise ValueError("level_set_walk needs samples and walk_length >= 1")
            if not (-2.0 < self.target < 2.0):
                raise ValueError("target must lie in (-2, 2)")
            if self.tol <= 0.0:
                raise ValueError("tol must be positive")
            if self.max_tries < 1:
                raise ValueError("max_tries must be >= 1")
        if self.kind == "lps_benchmark" and self.n != 3:
            raise ValueError("lps_benchmark uses the n = 3 preset")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class RunRecord:
    config: ExperimentConfig
    config_hash: str
    rows: list
    summary: dict
    wall_clock_s: float
    version: str
    path: str | None = None


# ---------------------------------------------------------------------------
# Serialization: JSON with floats at 17 significant digits


def json_line(obj) -> str:
    """Serialize to compact JSON; every float gets 17 significant digits."""
    return _fmt(obj)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if not math.isfinite(f):
            raise ValueError("records must not contain non-finite floats")
        return format(f, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if v is None:
        return "null"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_fmt(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(json_line(config.to_dict()).encode()).hexdigest()


def record_filename(config: ExperimentConfig) -> str:
    return f"{config.kind}-{config.seed}-{config_hash(config)[:8]}.jsonl"


# ---------------------------------------------------------------------------
# Per-row stream derivation: splitmix64 counter mix


_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(root_seed: int, tag: str, index: int) -> int:
    """Order-independent 64-bit stream seed for (root, tag, index)."""
    t = int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "big")
    return _splitmix64(_splitmix64(_splitmix64(root_seed & _MASK) ^ t) ^ (index & _MASK))


# ---------------------------------------------------------------------------
# Row computation per experiment kind


def _spectral_fields(t: GroupTuple, config: ExperimentConfig) -> dict:
    report = lambda1_estimate(t, config.cutoff_J)
    return {
        "per_level": [lam for _, lam in report.per_level],
        "lambda1_J": report.lambda1_J,
        "gap_proxy": report.gap_proxy,
        "pgap": pgap_from_report(report, config.threshold),
    }


def _scan_row(config: ExperimentConfig, i: int) -> dict:
    rng = np.random.default_rng(derive_seed(config.seed, config.kind, i))
    t = haar_tuple(rng, config.n)
    row = {"index": i, "digest": tuple_digest(t)}
    try:
        row.update(_spectral_fields(t, config))
    except EigensolverError as e:
        row["error"] = str(e)
        row["error_level"] = e.level_k
        return row
    if config.n == 2:
        row["commutator_trace"] = commutator_trace(t)
    return row


def _orbit_states(config: ExperimentConfig, start: GroupTuple | None):
    if start is None:
        rng = np.random.default_rng(derive_seed(config.seed, config.kind + ":start", 0))
        start = haar_tuple(rng, config.n)
    walk_rng = np.random.default_rng(derive_seed(config.seed, config.kind + ":walk", 0))
    walk = random_walk(walk_rng, config.n, config.walk_length)
    states = [start]
    for m in walk:
        states.append(apply_move(m, states[-1]))
    return walk, states


def _orbit_row(config: ExperimentConfig, i: int, walk, states, gaps) -> dict:
    m = walk.moves[i]
    t_after = states[i + 1]
    row = {
        "index": i,
        "move": str(m),
        "L": word_length_bound(m, config.n),
        "digest": tuple_digest(t_after),
    }
    before, after = gaps[i], gaps[i + 1]
    if isinstance(before, EigensolverError) or isinstance(after, EigensolverError):
        err = after if isinstance(after, EigensolverError) else before
        row["error"] = str(err)
        row["error_level"] = err.level_k
        return row
    row["gap_proxy_before"] = before["gap_proxy"]
    row.update(after)
    row["stability_ok"] = bool(
        row["gap_proxy"]
        >= row["gap_proxy_before"] / (config.n * row["L"] ** 2) - _STABILITY_SLACK
    )
    if config.n == 2:
        row["commutator_trace"] = commutator_trace(t_after)
    return row


def _fiber_row(config: ExperimentConfig, i: int) -> dict:
    rng = np.random.default_rng(derive_seed(config.seed, config.kind + ":fiber", i))
    t, tries = sample_level_set_counted(
        config.target, config.tol, rng, config.max_tries
    )
    row = {
        "index": i,
        "phase": "fiber",
        "tries": tries,
        "x": trace_coords(t).x,
        "commutator_trace": commutator_trace(t),
        "digest": tuple_digest(t),
    }
    try:
        row.update(_spectral_fields(t, config))
    except EigensolverError as e:
        row["error"] = str(e)
        row["error_level"] = e.level_k
    return row


def _fiber_walk_rows(config: ExperimentConfig) -> list[dict]:
    rng = np.random.default_rng(derive_seed(config.seed, config.kind + ":walkstart", 0))
    t, _ = sample_level_set_counted(config.target, config.tol, rng, config.max_tries)
    walk_rng = np.random.default_rng(derive_seed(config.seed, config.kind + ":walk", 0))
    walk = random_walk(walk_rng, 2, config.walk_length)
    rows = []
    for s, m in enumerate(walk):
        t = apply_move(m, t)
        rows.append({
            "index": config.samples + s,
            "phase": "walk",
            "x": trace_coords(t).x,
            "commutator_trace": commutator_trace(t),
        })
    return rows


def _lps_row(config: ExperimentConfig, i: int, preset: GroupTuple) -> dict:
    k = i + 1
    try:
        lam = lambda_max(averaging_operator(preset, k))
    except EigensolverError as e:
        return {"index": i, "k": k, "error": str(e), "error_level": k}
    return {"index": i, "k": k, "lambda_max": lam}


def row_count(config: ExperimentConfig) -> int:
    if config.kind == "zero_one_scan":
        return config.samples
    if config.kind == "orbit_invariance":
        return config.walk_length
    if config.kind == "level_set_walk":
        return config.samples + config.walk_length
    return config.cutoff_J


# ---------------------------------------------------------------------------
# Summaries (pure functions of config + rows, recomputable bit-exactly)


def _gap_quantiles(rows, config):
    """Median gap proxy at every prefix cutoff J' <= cutoff_J."""
    ok = [r for r in rows if "per_level" in r]
    if not ok:
        return []
    arr = np.array([r["per_level"] for r in ok])
    prefix = np.maximum.accumulate(arr, axis=1)
    return [float(v) for v in np.median(2.0 * config.n - prefix, axis=0)]


def recompute_summary(config: ExperimentConfig, rows: list) -> dict:
    """The summary statistic block, rebuilt from rows alone."""
    errors = sum(1 for r in rows if "error" in r)
    if config.kind == "zero_one_scan":
        ok = [r for r in rows if "error" not in r]
        pgaps = [r["pgap"] for r in ok]
        gaps = [r["gap_proxy"] for r in ok]
        return {
            "samples": len(rows),
            "errors": errors,
            "pgap_fraction": (sum(pgaps) / len(pgaps)) if pgaps else None,
            "gap_proxy_median": float(np.median(gaps)) if gaps else None,
            "gap_proxy_min": min(gaps) if gaps else None,
            "gap_proxy_max": max(gaps) if gaps else None,
            "gap_proxy_median_by_cutoff": _gap_quantiles(rows, config),
            "note": "finite-cutoff evidence only; not a verdict on the "
                    "measure-one alternative",
        }
    if config.kind == "orbit_invariance":
        ok = [r for r in rows if "error" not in r]
        checks = [r["stability_ok"] for r in ok]
        out = {
            "steps": len(rows),
            "errors": errors,
            "stability_pass_rate": (sum(checks) / len(checks)) if checks else None,
            "pgap_fraction": (sum(r["pgap"] for r in ok) / len(ok)) if ok else None,
            "final_gap_proxy": ok[-1]["gap_proxy"] if ok else None,
        }
        if config.n == 2:
            gs = [r["commutator_trace"] for r in rows if "commutator_trace" in r]
            out["max_g_drift"] = (max(gs) - min(gs)) if gs else None
        return out
    if config.kind == "level_set_walk":
        fiber = [r for r in rows if r.get("phase") == "fiber"]
        walk = [r for r in rows if r.get("phase") == "walk"]
        ok = [r for r in fiber if "error" not in r]
        tries = sum(r["tries"] for r in fiber)
        walk_gs = [r["commutator_trace"] for r in walk]
        fiber_gs = [r["commutator_trace"] for r in fiber]
        out = {
            "fiber_samples": len(fiber),
            "walk_steps": len(walk),
            "errors": errors,
            "acceptance_rate": (len(fiber) / tries) if tries else None,
            "pgap_zero_fraction": (
                sum(1 for r in ok if r["pgap"] == 0) / len(ok) if ok else None
            ),
            "max_g_drift_walk": (max(walk_gs) - min(walk_gs)) if walk_gs else None,
            "max_fiber_dev": (
                max(abs(g - config.target) for g in fiber_gs) if fiber_gs else None
            ),
        }
        if fiber and walk:
            ks = stats.ks_2samp(
                np.array([r["x"] for r in walk]), np.array([r["x"] for r in fiber])
            )
            out["ks_x_walk_vs_fiber"] = float(ks.statistic)
        else:
            out["ks_x_walk_vs_fiber"] = None
        return out
    # lps_benchmark
    ok = [r for r in rows if "error" not in r]
    edge = 2.0 * math.sqrt(5.0)
    max_overall = max((r["lambda_max"] for r in ok), default=None)
    max_even = max((r["lambda_max"] for r in ok if r["k"] % 2 == 0), default=None)
    return {
        "levels": len(rows),
        "errors": errors,
        "max_even": max_even,
        "max_overall": max_overall,
        "margin": (edge - max_overall) if max_overall is not None else None,
    }


# ---------------------------------------------------------------------------
# The driver


def _compute_rows(config: ExperimentConfig, start: int, threads: int,
                  orbit_start: GroupTuple | None):
    """Yield rows with index >= start, in index order."""
    total = row_count(config)
    if config.kind == "zero_one_scan":
        row_fn = lambda i: _scan_row(config, i)
    elif config.kind == "lps_benchmark":
        preset = lps_preset()
        row_fn = lambda i: _lps_row(config, i, preset)
    elif config.kind == "orbit_invariance":
        walk, states = _orbit_states(config, orbit_start)

        def state_gap(t):
            try:
                report = lambda1_estimate(t, config.cutoff_J)
            except EigensolverError as e:
                return e
            return {
                "per_level": [lam for _, lam in report.per_level],
                "lambda1_J": report.lambda1_J,
                "gap_proxy": report.gap_proxy,
                "pgap": pgap_from_report(report, config.threshold),
            }

        # only states from the resume point need spectra
        needed = states[start:]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                computed = list(ex.map(state_gap, needed))
        else:
            computed = [state_gap(t) for t in needed]
        gaps = {start + j: v for j, v in enumerate(computed)}
        for i in range(start, total):
            yield _orbit_row(config, i, walk, states, gaps)
        return
    else:  # level_set_walk
        fiber_total = config.samples

        def row_fn(i):
            return _fiber_row(config, i)

        indices = [i for i in range(start, min(fiber_total, total))]
        if threads > 1 and indices:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                futures = [ex.submit(row_fn, i) for i in indices]
                for f in futures:
                    yield f.result()
        else:
            for i in indices:
                yield row_fn(i)
        if total > fiber_total:
            walk_rows = _fiber_walk_rows(config)
            for r in walk_rows:
                if r["index"] >= start:
                    yield r
        return

    indices = list(range(start, total))
    if threads > 1 and indices:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            futures = [ex.submit(row_fn, i) for i in indices]
            for f in futures:
                yield f.result()
    else:
        for i in indices:
            yield row_fn(i)


def _read_partial(path: Path, config: ExperimentConfig):
    """Validate a partial record file and return its parsed rows."""
    lines = path.read_text().splitlines()
    if not lines:
        return []
    file_config = json.loads(lines[0])
    if file_config != json.loads(json_line(config.to_dict())):
        raise ValueError(f"config in {path} does not match the requested run")
    rows = []
    for line in lines[1:]:
        obj = json.loads(line)
        if "summary" in obj:
            raise ValueError(f"{path} already holds a completed run")
        rows.append(obj)
    for i, r in enumerate(rows):
        if r.get("index") != i:
            raise ValueError(f"{path} has a gap at row {i}; cannot resume")
    return rows


def run_experiment(config: ExperimentConfig, out_dir=None, threads: int = 1,
                   stop_after_rows: int | None = None, resume: bool = False,
                   orbit_start: GroupTuple | None = None) -> RunRecord:
    """Execute an experiment, optionally persisting and resuming.

    ``stop_after_rows`` ends the run early with a partial record file (no
    summary line); ``resume=True`` continues such a file.  Rows depend only
    on (config, index), so resumed and uninterrupted runs agree row for row,
    and any ``threads`` count produces identical records.
    """
    t0 = time.perf_counter()
    threads = max(1, int(threads))
    chash = config_hash(config)
    total = row_count(config)
    path = None
    handle = None
    rows: list = []
    if out_dir is not None:
        path = Path(out_dir) / record_filename(config)
        if resume and path.exists():
            rows = _read_partial(path, config)
            handle = open(path, "a")
        else:
            handle = open(path, "w")
            handle.write(json_line(config.to_dict()) + "\n")
            handle.flush()
    elif resume:
        raise ValueError("resume requires out_dir")

    try:
        for row in _compute_rows(config, len(rows), threads, orbit_start):
            rows.append(row)
            if handle is not None:
                handle.write(json_line(row) + "\n")
                handle.flush()
            if stop_after_rows is not None and len(rows) >= stop_after_rows:
                break
        complete = len(rows) == total
        summary = recompute_summary(config, rows) if complete else None
        wall = time.perf_counter() - t0
        if complete and handle is not None:
            handle.write(
                json_line({
                    "summary": summary,
                    "wall_clock_s": wall,
                    "version": ARTIFACT_VERSION,
                }) + "\n"
            )
    finally:
        if handle is not None:
            handle.close()
    return RunRecord(
        config=config,
        config_hash=chash,
        rows=rows,
        summary=summary,
        wall_clock_s=wall,
        version=ARTIFACT_VERSION,
        path=str(path) if path is not None else None,
    )


def load_record(path) -> RunRecord:
    """Parse a persisted record file back into a RunRecord."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    config = ExperimentConfig(**json.loads(lines[0]))
    rows, summary, wall, version = [], None, 0.0, None
    for line in lines[1:]:
        obj = json.loads(line)
        if "summary" in obj:
            summary = obj["summary"]
            wall = obj["wall_clock_s"]
            version = obj["version"]
        else:
            rows.append(obj)
    return RunRecord(
        config=config,
        config_hash=config_hash(config),
        rows=rows,
        summary=summary,
        wall_clock_s=wall,
        version=version,
        path=str(path),
    )
