"""Synthetic trivariate functional datasets with labelled outliers.

Every model draws ``n`` curves on a regular grid over [0, 1] as

``Y_i(t) = mu(t) + sum_m rho_im * psi_m(t) + eps_i(t)``

where ``psi_1..psi_M`` is a trivariate orthonormal family built by splitting
Fourier functions, ``rho_im ~ N(0, (M+1-m)/M)`` are independent scores and
``eps_i`` is white noise with one standard deviation per component drawn
uniformly from [0.1, 0.3] once per dataset.  A fixed share of curves is then
contaminated according to the chosen model:

* ``M0``: no contamination.
* ``M1``: mean (4t, 30t(1-t)^1.5, 5(t-1)^2); outliers shift by +-8 per
  component (sign drawn per outlier and component).
* ``M2``: mean (5sin(2pi t), 5cos(2pi t), 5(t-1)^2); outliers shift by +-8
  only inside a window [T, T+0.1] with T drawn uniformly from [0, 0.9].
* ``M3``: same mean as M2; outliers swap to the phase-shifted mean
  (5sin(2pi(t-0.3)), 5cos(2pi(t-0.2)), 5(0.1-t)^2).
* ``M4``: same mean as M2 plus a constant shift per curve and component drawn
  uniformly from [-2.1, 2.1]; outliers instead add
  (2sin(4pi t), 2cos(4pi t), 2cos(8pi t)).
* ``M5``: same mean as M2; outliers add (2+R) times the mean per component,
  with R drawn per outlier and component from an exponential with rate 2,
  minus 6 on the third component.
* ``M6``: same mean as M2 plus (8t sin(pi t), t cos(pi t), 6sin(2pi t) - 3)
  for all curves; outliers use (10t sin(pi t), 11t cos(pi t),
  10sin(2pi t) - 6) instead.

The variants ``M1_2``, ``M2_2``, ``M2_3``, ``M3_2``, ``M3_3`` and ``M5_2``
restrict the contamination of their base model to a subset of components (the
subsets are an interpretation choice; see :data:`VARIANT_DIMS`).

Draws happen in a fixed order (noise scales, scores, noise, any main-model
shifts, outlier positions, contamination parameters), so regenerating with
the same seed and contamination zero reproduces the uncontaminated part of
every curve bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datasets import Grid, MultivariateFunctionalDataset
from .errors import InvalidConfig

#: Number of components of the simulated curves.
N_DIMS = 3

#: Number of eigenfunctions in the Karhunen-Loeve part.
N_COMPONENTS = 9

BASE_MODELS = ("M0", "M1", "M2", "M3", "M4", "M5", "M6")

#: Components contaminated by each variant model.  The base models
#: contaminate every component.  These subsets are inferred choices, not part
#: of the variants' defining formulas.
VARIANT_DIMS = {
    "M1_2": ("M1", (0,)),
    "M2_2": ("M2", (0,)),
    "M2_3": ("M2", (0, 1)),
    "M3_2": ("M3", (0, 1)),
    "M3_3": ("M3", (2,)),
    "M5_2": ("M5", (0, 1)),
}

MODEL_IDS = BASE_MODELS + tuple(VARIANT_DIMS)


@dataclass(frozen=True)
class SimulationSpec:
    """Parameters of one synthetic dataset."""

    model: str = "M0"
    n: int = 100
    k: int = 50
    contamination: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_IDS:
            raise InvalidConfig(f"unknown model {self.model!r}; use one of {MODEL_IDS}")
        if self.n < 1:
            raise InvalidConfig("n must be at least 1")
        if self.k < 2:
            raise InvalidConfig("k must be at least 2")
        if not (0.0 <= self.contamination <= 1.0):
            raise InvalidConfig("contamination must lie in [0, 1]")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidConfig("seed must be a non-negative integer")

    @property
    def n_outliers(self) -> int:
        if self.model == "M0":
            return 0
        return int(np.floor(self.contamination * self.n))


@dataclass(frozen=True)
class LabeledDataset:
    """A generated dataset with its ground-truth outlier labels."""

    data: MultivariateFunctionalDataset
    outlier_indices: tuple[int, ...]
    outlier_info: dict[int, dict] = field(default_factory=dict)
    spec: SimulationSpec | None = None


def score_variances(n_components: int = N_COMPONENTS) -> np.ndarray:
    """Variances ``(M+1-m)/M`` of the scores, decreasing in ``m``."""
    m = np.arange(1, n_components + 1)
    return (n_components + 1 - m) / n_components


def multivariate_eigenfunctions(
    grid: Grid, n_components: int = N_COMPONENTS, n_dims: int = N_DIMS
) -> np.ndarray:
    """Orthonormal trivariate eigenfunctions evaluated on the grid.

    The Fourier family on [0, d] (constant, then sine and cosine pairs of
    increasing frequency) is cut into ``d`` unit-length pieces; piece ``j``
    becomes component ``j``.  The family is orthonormal under the inner
    product summing the per-component integrals over the grid's span, which
    is designed for grids on [0, 1].

    Returns an array of shape ``(n_components, n_dims, k)``.
    """
    if n_components < 1 or n_dims < 1:
        raise InvalidConfig("need at least one component and one dimension")
    t = grid.points
    out = np.empty((n_components, n_dims, t.size))
    for m in range(n_components):
        for j in range(n_dims):
            x = t + j
            if m == 0:
                out[m, j] = 1.0 / np.sqrt(n_dims)
            else:
                freq = (m + 1) // 2
                angle = 2.0 * np.pi * freq * x / n_dims
                wave = np.sin(angle) if m % 2 == 1 else np.cos(angle)
                out[m, j] = np.sqrt(2.0 / n_dims) * wave
    return out


def _mean_m0(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [4.0 * t, 30.0 * t * (1.0 - t) ** 1.5, 5.0 * (t - 1.0) ** 2], axis=-1
    )


def _mean_oscillating(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            5.0 * np.sin(2.0 * np.pi * t),
            5.0 * np.cos(2.0 * np.pi * t),
            5.0 * (t - 1.0) ** 2,
        ],
        axis=-1,
    )


def _mean_m3_contaminated(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            5.0 * np.sin(2.0 * np.pi * (t - 0.3)),
            5.0 * np.cos(2.0 * np.pi * (t - 0.2)),
            5.0 * (0.1 - t) ** 2,
        ],
        axis=-1,
    )


def _shift_m4_contaminated(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            2.0 * np.sin(4.0 * np.pi * t),
            2.0 * np.cos(4.0 * np.pi * t),
            2.0 * np.cos(8.0 * np.pi * t),
        ],
        axis=-1,
    )


def _shift_m6_main(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            8.0 * t * np.sin(np.pi * t),
            t * np.cos(np.pi * t),
            6.0 * np.sin(2.0 * np.pi * t) - 3.0,
        ],
        axis=-1,
    )


def _shift_m6_contaminated(t: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            10.0 * t * np.sin(np.pi * t),
            11.0 * t * np.cos(np.pi * t),
            10.0 * np.sin(2.0 * np.pi * t) - 6.0,
        ],
        axis=-1,
    )


def main_mean(model: str, t: np.ndarray) -> np.ndarray:
    """Closed-form mean of the uncontaminated curves, shape ``(k, d)``."""
    base = VARIANT_DIMS.get(model, (model, None))[0]
    if base in ("M0", "M1"):
        return _mean_m0(t)
    return _mean_oscillating(t)


def generate(spec: SimulationSpec) -> LabeledDataset:
    """Draw one labelled dataset according to ``spec``."""
    base, affected = VARIANT_DIMS.get(spec.model, (spec.model, tuple(range(N_DIMS))))
    affected = tuple(affected)
    rng = np.random.default_rng(spec.seed)
    grid = Grid.regular(spec.k)
    t = grid.points
    n, k = spec.n, spec.k

    psi = multivariate_eigenfunctions(grid)
    sigma = rng.uniform(0.1, 0.3, N_DIMS)
    scores = rng.standard_normal((n, N_COMPONENTS)) * np.sqrt(score_variances())
    noise = rng.standard_normal((n, k, N_DIMS)) * sigma

    values = main_mean(base, t)[None] + np.einsum("nm,mdk->nkd", scores, psi) + noise
    if base == "M4":
        # Constant per-curve shifts are part of the main model; outlier rows
        # get the contaminated shift below instead.
        flat_shifts = rng.uniform(-2.1, 2.1, (n, N_DIMS))

    n_out = spec.n_outliers
    outliers: tuple[int, ...] = ()
    info: dict[int, dict] = {}
    if n_out > 0:
        positions = np.sort(rng.choice(n, n_out, replace=False))
        outliers = tuple(int(i) for i in positions)
        out_mask = np.zeros(n, dtype=bool)
        out_mask[positions] = True

        if base == "M1":
            signs = rng.choice([-1.0, 1.0], size=(n_out, N_DIMS))
            for a, i in enumerate(outliers):
                shift = np.zeros((k, N_DIMS))
                shift[:, affected] = 8.0 * signs[a, affected]
                values[i] += shift
                info[i] = {"signs": [float(s) for s in signs[a]]}
        elif base == "M2":
            signs = rng.choice([-1.0, 1.0], size=(n_out, N_DIMS))
            starts = rng.uniform(0.0, 0.9, n_out)
            for a, i in enumerate(outliers):
                window = (t >= starts[a]) & (t <= starts[a] + 0.1)
                shift = np.zeros((k, N_DIMS))
                for j in affected:
                    shift[window, j] = 8.0 * signs[a, j]
                values[i] += shift
                info[i] = {
                    "signs": [float(s) for s in signs[a]],
                    "window_start": float(starts[a]),
                }
        elif base == "M3":
            swap = _mean_m3_contaminated(t) - _mean_oscillating(t)
            shift = np.zeros((k, N_DIMS))
            shift[:, affected] = swap[:, affected]
            for i in outliers:
                values[i] += shift
                info[i] = {}
        elif base == "M4":
            contaminated = _shift_m4_contaminated(t)
            for i in range(n):
                if out_mask[i]:
                    shift = np.zeros((k, N_DIMS))
                    shift[:, affected] = contaminated[:, affected]
                    values[i] += shift
                    info[i] = {}
                else:
                    values[i] += flat_shifts[i]
        elif base == "M5":
            scales = rng.exponential(scale=0.5, size=(n_out, N_DIMS))
            mean = _mean_oscillating(t)
            for a, i in enumerate(outliers):
                shift = np.zeros((k, N_DIMS))
                for j in affected:
                    shift[:, j] = (2.0 + scales[a, j]) * mean[:, j]
                    if j == 2:
                        shift[:, j] -= 6.0
                values[i] += shift
                info[i] = {"scales": [float(s) for s in scales[a]]}
        elif base == "M6":
            u_main = _shift_m6_main(t)
            u_con = _shift_m6_contaminated(t)
            values += u_main[None]
            shift = np.zeros((k, N_DIMS))
            shift[:, affected] = (u_con - u_main)[:, affected]
            for i in outliers:
                values[i] += shift
                info[i] = {}
    else:
        if base == "M4":
            values += flat_shifts[:, None, :]
        elif base == "M6":
            values += _shift_m6_main(t)[None]

    data = MultivariateFunctionalDataset(values, grid)
    return LabeledDataset(data, outliers, info, spec)
