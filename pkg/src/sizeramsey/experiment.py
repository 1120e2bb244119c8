"""Threshold-scan experiment runner with reproducible CSV output.

A scan walks a grid of host sizes and edge probabilities, runs a fixed number
of trials per cell in one of three modes (embed-only, colored-pipeline,
arrowing-exhaustive), and streams one CSV row per trial. Trial seeds derive
as hash(root_seed, n, p_index, trial_index), so extending a grid or trial
count never perturbs existing rows, and a fixed root seed replays the scan
bit for bit (wall-clock timing excluded — see ``record_timing``).
"""

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import ramsey
from .decompose import decompose_components
from .embedder import (EmbedConfig, HostPartition, embed_blocks,
                       occupancy_summary, verify_embedding)
from .errors import ConfigError, EmbeddingFailure, MalformedCSV, SizeRamseyError
from .graph import GnpParams, child_seed, gnp_sample, named_graph, \
    random_cubic, square_coloring

MODES = ("embed-only", "colored-pipeline", "arrowing-exhaustive")
CSV_FIELDS = ["run_id", "n", "p", "pattern_id", "seed", "mode", "outcome",
              "wall_time_ms", "bucket_trace", "reg_pass_fraction"]
SCHEMA_LINE = "# schema=1"


@dataclass
class ExperimentConfig:
    n_list: list
    p_grid: list                    # floats, or ("exp", K, e) entries
    pattern: str                    # e.g. "petersen", "cycle:8", "cubic:40"
    trials: int
    seed: int
    mode: str = "embed-only"
    budget: int = 1_000_000
    bucket_count: Optional[int] = 2
    kappa: float = 1.0 / 12.0
    num_cells: int = 20
    jobs: int = 1
    record_timing: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n_list or not self.p_grid:
            raise ConfigError("n_list and p_grid must be nonempty")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        parse_pattern_spec(self.pattern)  # fail fast on bad specs


def parse_pattern_spec(spec):
    """Split a pattern spec into (kind, arg): ('cubic', 40) samples a random
    cubic graph per trial; anything else resolves through named_graph."""
    s = spec.strip().lower()
    if ":" in s:
        base, arg = s.split(":", 1)
        if base == "cubic":
            k = int(arg)
            if k < 4 or k % 2:
                raise ConfigError("cubic:k needs even k >= 4")
            return ("cubic", k)
        name = f"{base}({int(arg)})"
        named_graph(name)
        return ("named", name)
    named_graph(s)
    return ("named", s)


def pattern_for_trial(spec, trial_seed):
    kind, arg = parse_pattern_spec(spec)
    if kind == "cubic":
        return random_cubic(arg, seed=child_seed(trial_seed, "pattern"))
    return named_graph(arg)


def resolve_p(entry, n):
    """Grid entries are absolute floats or ('exp', K, e) meaning K * n^e."""
    if isinstance(entry, tuple):
        tag, k, e = entry
        if tag != "exp":
            raise ConfigError(f"bad p-grid entry {entry!r}")
        return min(1.0, max(0.0, k * n ** e))
    p = float(entry)
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"absolute p={p} outside [0,1]")
    return p


@dataclass
class ExperimentRecord:
    run_id: str
    n: int
    p: float
    pattern_id: str
    seed: int
    mode: str
    outcome: str
    wall_time_ms: int
    bucket_trace: str
    reg_pass_fraction: str

    def row(self):
        return [self.run_id, str(self.n), repr(self.p), self.pattern_id,
                str(self.seed), self.mode, self.outcome,
                str(self.wall_time_ms), self.bucket_trace,
                self.reg_pass_fraction]


def _run_trial(config, n, p_index, p, trial):
    trial_seed = child_seed(config.seed, n, p_index, trial)
    run_id = f"{n}-{p_index}-{trial}"
    t0 = time.perf_counter()
    outcome, trace, reg = "success", "", ""
    pattern_id = config.pattern
    try:
        h = pattern_for_trial(config.pattern, trial_seed)
        g = gnp_sample(GnpParams(n, p, child_seed(trial_seed, "host")))
        if config.mode == "embed-only":
            outcome, trace = _embed_only(g, h, p, config, trial_seed)
        elif config.mode == "colored-pipeline":
            coloring = ramsey.EdgeColoring.random(
                g, child_seed(trial_seed, "coloring"))
            res = ramsey.ramsey_pipeline(
                g, coloring, h, seed=child_seed(trial_seed, "pipeline"),
                num_cells=config.num_cells,
                config_overrides={"kappa": config.kappa,
                                  "bucket_count": config.bucket_count,
                                  "node_budget": config.budget})
            if res.success:
                trace = occupancy_summary(res.state)
            else:
                outcome = f"failure({res.failure})"
            reg = _regularity_diagnostic(g, coloring, p, trial_seed)
        else:  # arrowing-exhaustive
            res = ramsey.is_ramsey_exhaustive(g, h)
            outcome = "success" if res.arrows else "failure(NotArrows)"
    except SizeRamseyError as exc:
        outcome = f"failure({type(exc).__name__})"
    wall = int((time.perf_counter() - t0) * 1000) if config.record_timing else 0
    return ExperimentRecord(run_id, n, p, pattern_id, trial_seed,
                            config.mode, outcome, wall, trace, reg)


def _regularity_diagnostic(g, coloring, p, trial_seed):
    """Sampled regularity verdict for one random cell pair of the majority
    class: '1' if no irregularity witness was found, else '0'."""
    from .regularity import RegularityParams, estimate_regularity
    red_e, blue_e = coloring.edge_counts()
    color = ramsey.RED if red_e >= blue_e else ramsey.BLUE
    gmaj = coloring.color_class(g.n, color)
    rng_seed = child_seed(trial_seed, "regdiag")
    from .graph import rng_for
    perm = rng_for(rng_seed, "cells").permutation(g.n)
    k = max(2, g.n // 20)
    a, b = perm[:k], perm[k:2 * k]
    params = RegularityParams(epsilon=0.25, p=min(1.0, max(p, 1e-9)))
    verdict = estimate_regularity(gmaj, a, b, params, samples=50,
                                  seed=child_seed(rng_seed, "est"))
    return "1" if verdict.regular else "0"


def _embed_only(g, h, p, config, trial_seed):
    decomp, k4_comps = decompose_components(h)
    if k4_comps:
        return "failure(IsK4)", ""
    col = square_coloring(h)
    part = HostPartition.random_equitable(
        range(g.n), col.num_colors, seed=child_seed(trial_seed, "part"))
    cfg = EmbedConfig(p=p, kappa=config.kappa,
                      bucket_count=config.bucket_count,
                      node_budget=config.budget,
                      seed=child_seed(trial_seed, "embed"))
    try:
        state = embed_blocks(g, h, decomp, part, col, cfg)
    except EmbeddingFailure as exc:
        return f"failure({type(exc).__name__})", ""
    if not verify_embedding(g, h, state):
        return "failure(VerificationFailed)", ""
    return "success", occupancy_summary(state)


def _trial_args(config):
    for n in config.n_list:
        for p_index, entry in enumerate(config.p_grid):
            p = resolve_p(entry, n)
            for trial in range(config.trials):
                yield (n, p_index, p, trial)


def _worker(args):
    config, n, p_index, p, trial = args
    return _run_trial(config, n, p_index, p, trial)


def threshold_scan(config, out):
    """Run the scan and stream CSV rows to ``out`` in deterministic order.

    Returns the list of ExperimentRecord rows. Per-trial failures are
    recorded as failure kinds; only config errors abort.
    """
    out.write(SCHEMA_LINE + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    args = list(_trial_args(config))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_worker, [(config,) + a for a in args],
                                    chunksize=4))
    else:
        records = [_run_trial(config, *a) for a in args]
    for rec in records:
        writer.writerow(rec.row())
    return records


def scan_to_string(config):
    buf = io.StringIO()
    threshold_scan(config, buf)
    return buf.getvalue()


def read_scan_csv(lines):
    """Parse a scan CSV back into dict rows, validating the schema line."""
    it = iter(lines)
    try:
        first = next(it).strip()
    except StopIteration:
        raise MalformedCSV("empty input")
    if first != SCHEMA_LINE:
        raise MalformedCSV(f"missing schema line, got {first!r}")
    reader = csv.reader(it)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCSV("missing header row")
    if header != CSV_FIELDS:
        raise MalformedCSV(f"unexpected header {header!r}")
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_FIELDS):
            raise MalformedCSV(f"row has {len(row)} fields: {row!r}")
        rows.append(dict(zip(CSV_FIELDS, row)))
    return rows


def wilson_interval(successes, trials, z=1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(
        phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


def emit_plot_data(lines, out):
    """Aggregate a scan CSV into per-(n,p) success rates with Wilson 95%
    intervals, as plain whitespace-separated columns."""
    rows = read_scan_csv(lines)
    cells = {}
    for r in rows:
        key = (int(r["n"]), float(r["p"]))
        tot, succ = cells.get(key, (0, 0))
        cells[key] = (tot + 1, succ + (r["outcome"] == "success"))
    out.write("# n p trials successes rate wilson_lo wilson_hi\n")
    for (n, p), (tot, succ) in sorted(cells.items()):
        lo, hi = wilson_interval(succ, tot)
        rate = succ / tot
        out.write(f"{n} {p:.10g} {tot} {succ} {rate:.6f} {lo:.6f} {hi:.6f}\n")


def success_counts(records):
    """Per-(n, p_index) success counts in grid order, for isotonic checks."""
    cells = {}
    for rec in records:
        n, p_index, _ = rec.run_id.split("-")
        key = (int(n), int(p_index))
        cells[key] = cells.get(key, 0) + (rec.outcome == "success")
    return cells


def isotonic_violations(counts, n, p_indices):
    seq = [counts.get((n, j), 0) for j in p_indices]
    return sum(1 for a, b in zip(seq, seq[1:]) if b < a)


def load_config_file(path):
    """key=value config file -> dict of raw string values."""
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values
