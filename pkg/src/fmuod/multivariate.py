"""Outlier detection for multivariate functional data.

Three strategies reduce the multivariate problem to univariate index
computations:

* marginal: run the univariate pipeline per component and join the flags;
* stringing: concatenate the (optionally rescaled) components of each curve
  into one long curve and run the univariate pipeline once;
* projection: project every curve onto random unit directions, run the
  univariate pipeline per projection, and let the projections vote.  A curve
  is flagged as an outlier of a given type when the share of projections
  voting for it reaches that type's threshold.

Thresholds for the projection vote can be fixed vote shares or can be chosen
adaptively from the observed vote excess over baseline false-vote rates: with
``delta_T`` the excess vote share of type ``T`` and ``delta_C`` the excess
share of curves receiving any vote, the threshold is
``tau_T = gamma_T - eta_T * clamp(delta_T / delta_C, 0, 1)``, falling back to
``gamma_T`` when the excess estimates are degenerate (``delta_C <= 0`` or a
negative ratio).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cutoffs import CutoffSpec, FlagSet, classify_outliers
from .datasets import FunctionalDataset, Grid, MultivariateFunctionalDataset
from .errors import InvalidConfig, InvalidDirection
from .indices import (
    LOCATION_MEDIAN,
    VARIANT_STANDARD,
    IndexTable,
    compute_index_table,
    reference_from_sample,
)
from .seeding import child_rng, child_seed

#: Order of the index types along the last axis of vote matrices and
#: proportion arrays.
TYPE_ORDER = ("shape", "amplitude", "magnitude")

#: Directions with squared norm below this are rejected and redrawn.
MIN_DIRECTION_NORM = 1e-8

#: Unit-norm tolerance for direction vectors.
DIRECTION_NORM_TOL = 1e-12

SCALE_MINMAX = "minmax"
SCALE_NONE = "none"
SCALES = (SCALE_MINMAX, SCALE_NONE)


# ---------------------------------------------------------------------------
# thresholds and baselines


@dataclass(frozen=True)
class Baselines:
    """Expected false-vote shares of the cutoffs on outlier-free data.

    ``shape``, ``amplitude`` and ``magnitude`` are the per-projection rates of
    votes of each type; ``union`` is the rate of curves receiving a vote of
    any type.
    """

    shape: float
    amplitude: float
    magnitude: float
    union: float

    def __post_init__(self):
        for value in (self.shape, self.amplitude, self.magnitude, self.union):
            if not (np.isfinite(value) and 0.0 <= value < 1.0):
                raise InvalidConfig("baseline rates must lie in [0, 1)")

    def by_type(self) -> tuple[float, float, float]:
        return (self.shape, self.amplitude, self.magnitude)

    def as_dict(self) -> dict[str, float]:
        return {
            "shape": self.shape,
            "amplitude": self.amplitude,
            "magnitude": self.magnitude,
            "union": self.union,
        }

    @classmethod
    def from_dict(cls, mapping) -> "Baselines":
        try:
            return cls(
                float(mapping["shape"]),
                float(mapping["amplitude"]),
                float(mapping["magnitude"]),
                float(mapping["union"]),
            )
        except KeyError as exc:
            raise InvalidConfig(f"baselines are missing the {exc.args[0]!r} rate") from exc


#: False-vote rates measured on the bundled outlier-free simulation model
#: (n=100 curves, k=50 grid points, 60 directions).  Regenerate with
#: :func:`fmuod.benchmark.estimate_null_baselines` or ``fmuod baselines``.
REFERENCE_BASELINES = Baselines(shape=0.075, amplitude=0.009, magnitude=0.009, union=0.09)


@dataclass(frozen=True)
class ThresholdTriple:
    """Vote-share thresholds for the three index types, each in (0, 1]."""

    shape: float
    amplitude: float
    magnitude: float
    selection: "ThresholdSelection | None" = None

    def __post_init__(self):
        for value in self.by_type():
            if not (np.isfinite(value) and 0.0 < value <= 1.0):
                raise InvalidConfig("vote-share thresholds must lie in (0, 1]")

    def by_type(self) -> tuple[float, float, float]:
        return (self.shape, self.amplitude, self.magnitude)


@dataclass(frozen=True)
class ThresholdSelection:
    """How adaptive thresholds were derived from a vote matrix.

    ``branches[t]`` records which case of the threshold formula fired for
    type ``t``: ``"scaled"`` (ratio inside [0, 1]), ``"capped"`` (ratio above
    one) or ``"fallback"`` (degenerate excess estimates).
    """

    baselines: Baselines
    gamma: tuple[float, float, float]
    eta: tuple[float, float, float]
    delta_types: tuple[float, float, float]
    delta_union: float
    ratios: tuple[float, float, float]
    branches: tuple[str, str, str]


#: Default fixed vote shares: 0.4 for shape, 0.3 for amplitude and magnitude.
DEFAULT_VOTE_SHARES = ThresholdTriple(shape=0.4, amplitude=0.3, magnitude=0.3)

#: Sentinel share that flags a curve as soon as one projection votes for it.
#: Vote proportions are multiples of 1/L, so any positive share clears it.
ANY_VOTE_SHARE = float(np.finfo(np.float64).eps)

ANY_VOTE_THRESHOLDS = ThresholdTriple(ANY_VOTE_SHARE, ANY_VOTE_SHARE, ANY_VOTE_SHARE)

#: Default upper anchors of the adaptive threshold formula.
DEFAULT_GAMMA = (0.7, 0.7, 0.7)

#: Default maximum reductions of the adaptive threshold formula.
DEFAULT_ETA = (0.3, 0.4, 0.4)


# ---------------------------------------------------------------------------
# directions and projections


@dataclass(frozen=True)
class DirectionSet:
    """Unit projection directions, one per row."""

    vectors: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=float)
        if vecs.ndim != 2 or vecs.shape[0] < 1 or vecs.shape[1] < 1:
            raise InvalidDirection("directions must form a non-empty 2-d array")
        if not np.all(np.isfinite(vecs)):
            raise InvalidDirection("directions contain NaN or infinite entries")
        norms = np.sqrt((vecs * vecs).sum(axis=1))
        if np.max(np.abs(norms - 1.0)) > DIRECTION_NORM_TOL:
            raise InvalidDirection(
                f"direction rows must have unit norm within {DIRECTION_NORM_TOL:g}"
            )
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def n_directions(self) -> int:
        return self.vectors.shape[0]

    @property
    def n_dims(self) -> int:
        return self.vectors.shape[1]


def generate_directions(n_directions: int, n_dims: int, seed: int) -> DirectionSet:
    """Draw unit directions uniformly from the cube and normalise them.

    Each direction has its own generator derived from ``(seed, index)``, so
    direction ``l`` does not depend on how many directions are requested.
    Draws with norm below :data:`MIN_DIRECTION_NORM` are rejected and redrawn.
    """
    if n_directions < 1 or n_dims < 1:
        raise InvalidConfig("need at least one direction and one dimension")
    vectors = np.empty((n_directions, n_dims))
    for l in range(n_directions):
        rng = child_rng(seed, l)
        while True:
            v = rng.uniform(-1.0, 1.0, n_dims)
            norm = float(np.sqrt(v @ v))
            if norm >= MIN_DIRECTION_NORM:
                break
        vectors[l] = v / norm
    return DirectionSet(vectors, seed=seed)


def project(data: MultivariateFunctionalDataset, direction) -> FunctionalDataset:
    """Pointwise projection of every curve onto one direction vector."""
    vec = np.asarray(direction, dtype=float)
    if vec.ndim != 1 or vec.size != data.n_dims:
        raise InvalidDirection(
            f"direction must have {data.n_dims} components, got shape {vec.shape}"
        )
    if not np.all(np.isfinite(vec)):
        raise InvalidDirection("direction contains NaN or infinite entries")
    if float(np.sqrt(vec @ vec)) < MIN_DIRECTION_NORM:
        raise InvalidDirection("direction norm is (near-)zero")
    # Accumulate per component: elementwise kernels keep results independent
    # of BLAS threading.
    out = data.values[:, :, 0] * vec[0]
    for m in range(1, data.n_dims):
        out = out + data.values[:, :, m] * vec[m]
    return FunctionalDataset(out, data.grid)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class OutlierReport:
    """Outcome of one detection run."""

    method: str
    n: int
    flags: FlagSet
    proportions: np.ndarray | None = None
    thresholds: ThresholdTriple | None = None
    degenerate_projections: int = 0
    config: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# marginal detection


def _classify_sample(
    data: FunctionalDataset,
    variant: str,
    cutoff: CutoffSpec | None,
    location: str,
) -> FlagSet:
    ref = reference_from_sample(data, location)
    table = compute_index_table(data, ref, variant)
    return classify_outliers(table, cutoff)


def marginal_tables(
    data: MultivariateFunctionalDataset,
    variant: str = VARIANT_STANDARD,
    location: str = LOCATION_MEDIAN,
) -> list[IndexTable]:
    """Univariate index tables of each component."""
    tables = []
    for m in range(data.n_dims):
        margin = data.margin(m)
        tables.append(compute_index_table(margin, reference_from_sample(margin, location), variant))
    return tables


def detect_marginal(
    data: MultivariateFunctionalDataset,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
    method: str = "FST_MAR",
) -> OutlierReport:
    """Classify per component and join the flags of each type across components."""
    per_margin = [
        _classify_sample(data.margin(m), variant, cutoff, location) for m in range(data.n_dims)
    ]
    flags = FlagSet(
        data.n,
        frozenset().union(*(f.shape_outliers for f in per_margin)),
        frozenset().union(*(f.amplitude_outliers for f in per_margin)),
        frozenset().union(*(f.magnitude_outliers for f in per_margin)),
    )
    return OutlierReport(method, data.n, flags, config={"variant": variant, "location": location})


# ---------------------------------------------------------------------------
# stringing


def string_dimensions(
    data: MultivariateFunctionalDataset, scale: str = SCALE_NONE
) -> FunctionalDataset:
    """Concatenate the components of each curve into one long curve.

    With ``scale="minmax"`` each component is first rescaled to [0, 1] using
    its pooled minimum and maximum over all curves and grid points; a
    zero-range component becomes identically zero.  The output grid keeps the
    input spacing and starts at the first input point.
    """
    if scale not in SCALES:
        raise InvalidConfig(f"unknown scale {scale!r}; use one of {SCALES}")
    pieces = []
    for m in range(data.n_dims):
        block = data.values[:, :, m]
        if scale == SCALE_MINMAX:
            low = block.min()
            span = block.max() - low
            block = np.zeros_like(block) if span == 0.0 else (block - low) / span
        pieces.append(block)
    values = np.concatenate(pieces, axis=1)
    start = float(data.grid.points[0])
    step = data.grid.spacing
    grid = Grid(start + step * np.arange(data.k * data.n_dims))
    return FunctionalDataset(values, grid)


def stringed_table(
    data: MultivariateFunctionalDataset,
    scale: str = SCALE_NONE,
    variant: str = VARIANT_STANDARD,
    location: str = LOCATION_MEDIAN,
) -> IndexTable:
    """Univariate index table of the stringed dataset."""
    strung = string_dimensions(data, scale)
    return compute_index_table(strung, reference_from_sample(strung, location), variant)


def detect_stringed(
    data: MultivariateFunctionalDataset,
    scale: str = SCALE_NONE,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
    method: str = "FST_STR",
) -> OutlierReport:
    """Run the univariate pipeline on the stringed curves."""
    strung = string_dimensions(data, scale)
    flags = _classify_sample(strung, variant, cutoff, location)
    return OutlierReport(
        method,
        data.n,
        flags,
        config={"scale": scale, "variant": variant, "location": location},
    )


# ---------------------------------------------------------------------------
# projection voting


@dataclass(frozen=True)
class VoteMatrix:
    """Boolean votes per (curve, projection, index type).

    ``votes[i, l, t]`` says projection ``l`` voted curve ``i`` an outlier of
    type ``TYPE_ORDER[t]``.  Projections whose reference curve was constant
    contribute no votes and are counted in ``degenerate_projections``.
    """

    votes: np.ndarray
    degenerate_projections: int = 0

    def __post_init__(self):
        votes = np.asarray(self.votes)
        if votes.ndim != 3 or votes.shape[2] != len(TYPE_ORDER):
            raise InvalidConfig(
                f"votes must have shape (n, L, {len(TYPE_ORDER)}), got {votes.shape}"
            )
        if votes.dtype != np.bool_:
            raise InvalidConfig("votes must be boolean")
        votes = votes.copy()
        votes.setflags(write=False)
        object.__setattr__(self, "votes", votes)

    @property
    def n(self) -> int:
        return self.votes.shape[0]

    @property
    def n_projections(self) -> int:
        return self.votes.shape[1]

    @property
    def proportions(self) -> np.ndarray:
        """Per-curve vote shares, exact counts over the projection count."""
        return self.votes.sum(axis=1) / self.n_projections

    def type_shares(self) -> tuple[float, float, float]:
        """Overall share of (curve, projection) pairs voted per type."""
        total = self.n * self.n_projections
        counts = self.votes.sum(axis=(0, 1))
        return tuple(float(c) / total for c in counts)

    def union_share(self) -> float:
        """Overall share of (curve, projection) pairs voted for any type."""
        total = self.n * self.n_projections
        return float(self.votes.any(axis=2).sum()) / total

    def flags_at(self, thresholds: ThresholdTriple) -> FlagSet:
        """Curves whose vote share reaches the threshold of each type."""
        props = self.proportions
        taus = thresholds.by_type()
        sets = [
            frozenset(np.nonzero(props[:, t] >= taus[t])[0].tolist())
            for t in range(len(TYPE_ORDER))
        ]
        return FlagSet(self.n, sets[0], sets[1], sets[2])


def projection_tables(
    data: MultivariateFunctionalDataset,
    directions: DirectionSet,
    variant: str = VARIANT_STANDARD,
    location: str = LOCATION_MEDIAN,
):
    """Yield ``(l, table)`` per direction; ``table`` is None when degenerate."""
    if directions.n_dims != data.n_dims:
        raise InvalidDirection(
            f"directions have {directions.n_dims} components but the data has {data.n_dims}"
        )
    for l in range(directions.n_directions):
        proj = project(data, directions.vectors[l])
        ref = reference_from_sample(proj, location)
        if ref.is_degenerate:
            yield l, None
        else:
            yield l, compute_index_table(proj, ref, variant)


def collect_votes(
    data: MultivariateFunctionalDataset,
    directions: DirectionSet,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
) -> VoteMatrix:
    """Run the univariate pipeline per projection and record its votes."""
    votes = np.zeros((data.n, directions.n_directions, len(TYPE_ORDER)), dtype=bool)
    degenerate = 0
    for l, table in projection_tables(data, directions, variant, location):
        if table is None:
            degenerate += 1
            continue
        flags = classify_outliers(table, cutoff)
        votes[list(flags.shape_outliers), l, 0] = True
        votes[list(flags.amplitude_outliers), l, 1] = True
        votes[list(flags.magnitude_outliers), l, 2] = True
    return VoteMatrix(votes, degenerate)


def select_thresholds(
    votes: VoteMatrix,
    baselines: Baselines = REFERENCE_BASELINES,
    gamma: tuple[float, float, float] = DEFAULT_GAMMA,
    eta: tuple[float, float, float] = DEFAULT_ETA,
) -> ThresholdTriple:
    """Choose vote-share thresholds from the observed vote excess.

    The estimated share of outliers of type ``T`` is the observed vote share
    minus the baseline false-vote rate (``delta_T``); likewise ``delta_C``
    for votes of any type.  Types that explain a larger part of the overall
    contamination get a lower threshold:
    ``tau_T = gamma_T - eta_T * clamp(delta_T / delta_C, 0, 1)``.  When
    ``delta_C <= 0`` or the ratio is negative, ``tau_T`` stays at ``gamma_T``.
    """
    for t in range(len(TYPE_ORDER)):
        if not (0.0 < gamma[t] <= 1.0):
            raise InvalidConfig("gamma anchors must lie in (0, 1]")
        if not (0.0 <= eta[t] < gamma[t]):
            raise InvalidConfig("eta reductions must lie in [0, gamma)")
    delta_types = tuple(
        share - base for share, base in zip(votes.type_shares(), baselines.by_type())
    )
    delta_union = votes.union_share() - baselines.union

    taus = []
    ratios = []
    branches = []
    for t in range(len(TYPE_ORDER)):
        if delta_union <= 0.0:
            ratio, branch, tau = float("nan"), "fallback", gamma[t]
        else:
            ratio = delta_types[t] / delta_union
            if ratio < 0.0:
                branch, tau = "fallback", gamma[t]
            elif ratio > 1.0:
                branch, tau = "capped", gamma[t] - eta[t]
            else:
                branch, tau = "scaled", gamma[t] - eta[t] * ratio
        taus.append(tau)
        ratios.append(ratio)
        branches.append(branch)

    selection = ThresholdSelection(
        baselines=baselines,
        gamma=tuple(gamma),
        eta=tuple(eta),
        delta_types=delta_types,
        delta_union=delta_union,
        ratios=tuple(ratios),
        branches=tuple(branches),
    )
    return ThresholdTriple(taus[0], taus[1], taus[2], selection=selection)


def detect_projection(
    data: MultivariateFunctionalDataset,
    directions: DirectionSet,
    shares: ThresholdTriple = DEFAULT_VOTE_SHARES,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
    method: str = "FST_PRJ1",
) -> OutlierReport:
    """Projection vote with fixed vote-share thresholds."""
    votes = collect_votes(data, directions, variant, cutoff, location)
    return OutlierReport(
        method,
        data.n,
        votes.flags_at(shares),
        proportions=votes.proportions,
        thresholds=shares,
        degenerate_projections=votes.degenerate_projections,
        config={
            "n_directions": directions.n_directions,
            "direction_seed": directions.seed,
            "variant": variant,
            "location": location,
        },
    )


def detect_projection_adaptive(
    data: MultivariateFunctionalDataset,
    directions: DirectionSet,
    baselines: Baselines = REFERENCE_BASELINES,
    gamma: tuple[float, float, float] = DEFAULT_GAMMA,
    eta: tuple[float, float, float] = DEFAULT_ETA,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
    method: str = "FST_PRJ",
) -> OutlierReport:
    """Projection vote with thresholds selected from the vote excess."""
    votes = collect_votes(data, directions, variant, cutoff, location)
    thresholds = select_thresholds(votes, baselines, gamma, eta)
    return OutlierReport(
        method,
        data.n,
        votes.flags_at(thresholds),
        proportions=votes.proportions,
        thresholds=thresholds,
        degenerate_projections=votes.degenerate_projections,
        config={
            "n_directions": directions.n_directions,
            "direction_seed": directions.seed,
            "variant": variant,
            "location": location,
        },
    )


def estimate_baselines(
    sample,
    reps: int,
    n_directions: int = 60,
    seed: int = 0,
    variant: str = VARIANT_STANDARD,
    cutoff: CutoffSpec | None = None,
    location: str = LOCATION_MEDIAN,
) -> Baselines:
    """Average false-vote shares over repeated outlier-free samples.

    Parameters
    ----------
    sample : callable
        ``sample(seed) -> MultivariateFunctionalDataset`` producing
        outlier-free data.
    reps : int
        Number of repetitions to average over.
    n_directions : int
        Directions per repetition.
    seed : int
        Master seed; repetition ``r`` uses data seed ``(seed, r, 0)`` and
        direction seed ``(seed, r, 1)``.
    """
    if reps < 1:
        raise InvalidConfig("baseline estimation needs at least one repetition")
    type_sums = np.zeros(len(TYPE_ORDER))
    union_sum = 0.0
    for r in range(reps):
        data = sample(child_seed(seed, r, 0))
        directions = generate_directions(n_directions, data.n_dims, child_seed(seed, r, 1))
        votes = collect_votes(data, directions, variant, cutoff, location)
        type_sums += np.asarray(votes.type_shares())
        union_sum += votes.union_share()
    type_means = type_sums / reps
    return Baselines(
        shape=float(type_means[0]),
        amplitude=float(type_means[1]),
        magnitude=float(type_means[2]),
        union=union_sum / reps,
    )
