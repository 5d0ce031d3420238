"""Detection-rate benchmarks on the simulation models.

A benchmark repeats ``generate -> detect -> score`` with per-repetition seeds
derived from a master seed, then aggregates true- and false-positive rates
(percentages) across repetitions.  Repetitions may run on a thread pool; the
``FMUOD_THREADS`` environment variable caps the worker count and never
changes any result.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cutoffs import CutoffSpec
from .datasets import MultivariateFunctionalDataset
from .errors import InvalidConfig
from .indices import LOCATION_MEDIAN, VARIANT_STANDARD, VARIANTS
from .multivariate import (
    ANY_VOTE_THRESHOLDS,
    DEFAULT_ETA,
    DEFAULT_GAMMA,
    DEFAULT_VOTE_SHARES,
    REFERENCE_BASELINES,
    SCALE_NONE,
    SCALES,
    Baselines,
    OutlierReport,
    ThresholdTriple,
    collect_votes,
    detect_marginal,
    detect_projection,
    detect_projection_adaptive,
    detect_stringed,
    estimate_baselines,
    generate_directions,
)
from .seeding import child_seed
from .simulation import SimulationSpec, generate

METHOD_MARGINAL = "FST_MAR"
METHOD_STRINGING = "FST_STR"
METHOD_PROJECTION_ADAPTIVE = "FST_PRJ"
METHOD_PROJECTION_FIXED = "FST_PRJ1"
METHOD_PROJECTION_ANY = "FST_PRJ2"
METHODS = (
    METHOD_MARGINAL,
    METHOD_STRINGING,
    METHOD_PROJECTION_ADAPTIVE,
    METHOD_PROJECTION_FIXED,
    METHOD_PROJECTION_ANY,
)

SCOPE_UNION = "union"
SCOPE_SHAPE = "shape_only"
SCOPE_AMPLITUDE = "amplitude_only"
SCOPE_MAGNITUDE = "magnitude_only"
SCOPES = (SCOPE_UNION, SCOPE_SHAPE, SCOPE_AMPLITUDE, SCOPE_MAGNITUDE)

#: Default number of projection directions.
DEFAULT_N_DIRECTIONS = 60

THREADS_ENV = "FMUOD_THREADS"


def worker_count() -> int:
    """Thread-pool size: ``FMUOD_THREADS`` when set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise InvalidConfig(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise InvalidConfig(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class MethodConfig:
    """A detection method plus everything needed to run it."""

    method: str
    report_scope: str = SCOPE_UNION
    n_directions: int = DEFAULT_N_DIRECTIONS
    vote_shares: ThresholdTriple = DEFAULT_VOTE_SHARES
    baselines: Baselines = REFERENCE_BASELINES
    gamma: tuple[float, float, float] = DEFAULT_GAMMA
    eta: tuple[float, float, float] = DEFAULT_ETA
    scale: str = SCALE_NONE
    variant: str = VARIANT_STANDARD
    cutoff: CutoffSpec | None = None
    location: str = LOCATION_MEDIAN

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}; use one of {METHODS}")
        if self.report_scope not in SCOPES:
            raise InvalidConfig(f"unknown scope {self.report_scope!r}; use one of {SCOPES}")
        if self.n_directions < 1:
            raise InvalidConfig("n_directions must be at least 1")
        if self.scale not in SCALES:
            raise InvalidConfig(f"unknown scale {self.scale!r}; use one of {SCALES}")
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"unknown variant {self.variant!r}; use one of {VARIANTS}")


def run_method(
    data: MultivariateFunctionalDataset, config: MethodConfig, seed: int
) -> OutlierReport:
    """Run one configured method on one dataset.

    ``seed`` feeds direction generation for the projection methods and is
    ignored by the marginal and stringing methods.
    """
    if config.method == METHOD_MARGINAL:
        return detect_marginal(data, config.variant, config.cutoff, config.location)
    if config.method == METHOD_STRINGING:
        return detect_stringed(
            data, config.scale, config.variant, config.cutoff, config.location
        )
    directions = generate_directions(config.n_directions, data.n_dims, seed)
    if config.method == METHOD_PROJECTION_ADAPTIVE:
        return detect_projection_adaptive(
            data,
            directions,
            config.baselines,
            config.gamma,
            config.eta,
            config.variant,
            config.cutoff,
            config.location,
            method=config.method,
        )
    shares = ANY_VOTE_THRESHOLDS if config.method == METHOD_PROJECTION_ANY else config.vote_shares
    return detect_projection(
        data,
        directions,
        shares,
        config.variant,
        config.cutoff,
        config.location,
        method=config.method,
    )


def scoped_flags(report: OutlierReport, scope: str) -> frozenset[int]:
    """The flag set a benchmark scores under the given reporting scope."""
    if scope == SCOPE_UNION:
        return report.flags.union
    if scope == SCOPE_SHAPE:
        return report.flags.shape_outliers
    if scope == SCOPE_AMPLITUDE:
        return report.flags.amplitude_outliers
    if scope == SCOPE_MAGNITUDE:
        return report.flags.magnitude_outliers
    raise InvalidConfig(f"unknown scope {scope!r}; use one of {SCOPES}")


def score_flags(
    flagged: frozenset[int], truth: tuple[int, ...], n: int
) -> tuple[float, float]:
    """True- and false-positive rates in percent; TPR is NaN without truth."""
    truth_set = frozenset(truth)
    if not truth_set.issubset(range(n)):
        raise InvalidConfig("truth indices out of range")
    n_true = len(truth_set)
    false_pos = len(flagged - truth_set)
    tpr = 100.0 * len(flagged & truth_set) / n_true if n_true else float("nan")
    fpr = 100.0 * false_pos / (n - n_true) if n > n_true else float("nan")
    return tpr, fpr


def f1_score(flagged: frozenset[int], truth: frozenset[int]) -> float:
    """Harmonic mean of precision and recall; zero when both are zero."""
    tp = len(flagged & truth)
    precision = tp / len(flagged) if flagged else 0.0
    recall = tp / len(truth) if truth else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class BenchmarkResult:
    """Per-repetition detection rates of one model/method pair."""

    model: str
    method: str
    report_scope: str
    n: int
    k: int
    contamination: float
    seed: int
    tpr: np.ndarray | None
    fpr: np.ndarray
    runtime_seconds: float = 0.0

    @property
    def reps(self) -> int:
        return self.fpr.size

    @property
    def tpr_mean(self) -> float:
        return float("nan") if self.tpr is None else float(self.tpr.mean())

    @property
    def tpr_sd(self) -> float:
        return float("nan") if self.tpr is None else _sd(self.tpr)

    @property
    def fpr_mean(self) -> float:
        return float(self.fpr.mean())

    @property
    def fpr_sd(self) -> float:
        return _sd(self.fpr)


def _sd(values: np.ndarray) -> float:
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def _map_reps(fn, reps: int):
    """Apply ``fn`` to every repetition index, possibly on a thread pool."""
    workers = min(worker_count(), reps)
    if workers <= 1:
        return [fn(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(reps)))


def _rep_seeds(master_seed: int, rep: int) -> tuple[int, int]:
    return child_seed(master_seed, rep, 0), child_seed(master_seed, rep, 1)


def run_benchmark(
    model: str,
    config: MethodConfig,
    reps: int,
    n: int = 100,
    k: int = 50,
    contamination: float = 0.1,
    seed: int = 0,
) -> BenchmarkResult:
    """Repeat generate/detect/score and collect the rates.

    Repetition ``r`` generates with seed ``(seed, r, 0)`` and detects with
    direction seed ``(seed, r, 1)``, so results do not depend on the worker
    count or on which other repetitions run.
    """
    if reps < 1:
        raise InvalidConfig("benchmark needs at least one repetition")
    started = time.monotonic()

    def one_rep(r: int) -> tuple[float, float]:
        data_seed, method_seed = _rep_seeds(seed, r)
        labeled = generate(SimulationSpec(model, n, k, contamination, data_seed))
        report = run_method(labeled.data, config, method_seed)
        return score_flags(scoped_flags(report, config.report_scope), labeled.outlier_indices, n)

    pairs = _map_reps(one_rep, reps)
    tpr = np.array([p[0] for p in pairs])
    fpr = np.array([p[1] for p in pairs])
    has_truth = SimulationSpec(model, n, k, contamination, 0).n_outliers > 0
    return BenchmarkResult(
        model=model,
        method=config.method,
        report_scope=config.report_scope,
        n=n,
        k=k,
        contamination=contamination,
        seed=seed,
        tpr=tpr if has_truth else None,
        fpr=fpr,
        runtime_seconds=time.monotonic() - started,
    )


@dataclass(frozen=True)
class SweepPoint:
    """Score of one vote-share triple in a threshold sweep."""

    shares: ThresholdTriple
    f1: np.ndarray | None
    fpr: np.ndarray

    @property
    def f1_mean(self) -> float:
        return float("nan") if self.f1 is None else float(self.f1.mean())

    @property
    def f1_sd(self) -> float:
        return float("nan") if self.f1 is None else _sd(self.f1)

    @property
    def fpr_mean(self) -> float:
        return float(self.fpr.mean())

    @property
    def fpr_sd(self) -> float:
        return _sd(self.fpr)


def threshold_sweep(
    model: str,
    shares_grid,
    reps: int,
    n: int = 100,
    k: int = 50,
    contamination: float = 0.1,
    seed: int = 0,
    n_directions: int = DEFAULT_N_DIRECTIONS,
    report_scope: str = SCOPE_UNION,
) -> list[SweepPoint]:
    """Score a grid of fixed vote-share triples on one model.

    Votes are collected once per repetition and rescored at every triple.
    Models without outliers are scored by false-positive rate alone (``f1``
    is None); otherwise each point carries per-repetition F1 scores.
    """
    shares_grid = list(shares_grid)
    if not shares_grid:
        raise InvalidConfig("sweep needs at least one vote-share triple")
    if reps < 1:
        raise InvalidConfig("sweep needs at least one repetition")
    has_truth = SimulationSpec(model, n, k, contamination, 0).n_outliers > 0

    def one_rep(r: int):
        data_seed, method_seed = _rep_seeds(seed, r)
        labeled = generate(SimulationSpec(model, n, k, contamination, data_seed))
        directions = generate_directions(n_directions, labeled.data.n_dims, method_seed)
        votes = collect_votes(labeled.data, directions)
        truth = frozenset(labeled.outlier_indices)
        f1_row = np.empty(len(shares_grid))
        fpr_row = np.empty(len(shares_grid))
        for s, shares in enumerate(shares_grid):
            flags = votes.flags_at(shares)
            flagged = scoped_flags(
                OutlierReport("sweep", labeled.data.n, flags), report_scope
            )
            f1_row[s] = f1_score(flagged, truth)
            fpr_row[s] = score_flags(flagged, labeled.outlier_indices, n)[1]
        return f1_row, fpr_row

    rows = _map_reps(one_rep, reps)
    f1 = np.stack([row[0] for row in rows])
    fpr = np.stack([row[1] for row in rows])
    return [
        SweepPoint(shares, f1[:, s] if has_truth else None, fpr[:, s])
        for s, shares in enumerate(shares_grid)
    ]


def estimate_null_baselines(
    reps: int,
    n: int = 100,
    k: int = 50,
    n_directions: int = DEFAULT_N_DIRECTIONS,
    seed: int = 0,
) -> Baselines:
    """Estimate false-vote baselines from the outlier-free model."""

    def sample(data_seed: int) -> MultivariateFunctionalDataset:
        return generate(SimulationSpec("M0", n, k, 0.0, data_seed)).data

    return estimate_baselines(sample, reps, n_directions, seed)


def format_result_table(results) -> str:
    """Aligned text table of benchmark results."""
    header = ("model", "method", "scope", "reps", "tpr", "fpr", "seconds")
    rows = [header]
    for res in results:
        tpr = "-" if res.tpr is None else f"{res.tpr_mean:.1f} ({res.tpr_sd:.1f})"
        rows.append(
            (
                res.model,
                res.method,
                res.report_scope,
                str(res.reps),
                tpr,
                f"{res.fpr_mean:.1f} ({res.fpr_sd:.1f})",
                f"{res.runtime_seconds:.2f}",
            )
        )
    widths = [max(len(row[c]) for row in rows) for c in range(len(header))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
    return "\n".join(lines)
