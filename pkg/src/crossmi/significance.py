"""Block-shuffle permutation tests for MI, MI differences and cross MI.

Autocorrelation in the series is preserved in the surrogates by moving
contiguous blocks rather than single samples. Every replicate draws its
randomness from ``(rng_seed, replicate index)``, so results do not depend on
the order in which replicates are evaluated.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .dataset import EstimatorConfig, PairedSeries
from .estimators import estimate_cross_mi, estimate_mi

DEFAULT_PERMUTATIONS = 200


class TestKind(str, enum.Enum):
    MI_NONZERO = "MI_NONZERO"
    MI_DIFFERENCE = "MI_DIFFERENCE"
    CROSS_MI_NONZERO = "CROSS_MI_NONZERO"


class ShuffleTarget(str, enum.Enum):
    TEST = "TEST"
    REFERENCE = "REFERENCE"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclasses.dataclass(frozen=True)
class BlockSpec:
    """Permutation settings. ``block_len=None`` selects the block length
    from the data with :func:`estimate_block_length`."""

    block_len: Optional[int] = None
    n_permutations: int = DEFAULT_PERMUTATIONS
    rng_seed: int = 0

    def __post_init__(self):
        if self.block_len is not None and (int(self.block_len) != self.block_len
                                           or self.block_len < 1):
            raise ValueError("block_len must be a positive integer")
        if int(self.n_permutations) != self.n_permutations or self.n_permutations < 1:
            raise ValueError("n_permutations must be a positive integer")

    def replicate_rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([int(self.rng_seed) % (1 << 63), index])


@dataclasses.dataclass(frozen=True, eq=False)
class PermutationTestResult:
    observed: float
    null_samples: np.ndarray
    test_kind: TestKind
    shuffle_target: ShuffleTarget
    block_len: int
    rng_seed: int = 0
    null_centre: float = 0.0

    kind = "PermutationTestResult"

    def __post_init__(self):
        nulls = np.array(self.null_samples, dtype=float, ndmin=1)
        nulls.setflags(write=False)
        object.__setattr__(self, "null_samples", nulls)
        object.__setattr__(self, "observed", float(self.observed))
        object.__setattr__(self, "test_kind", TestKind(self.test_kind))
        object.__setattr__(self, "shuffle_target", ShuffleTarget(self.shuffle_target))

    @property
    def n_permutations(self) -> int:
        return self.null_samples.size

    @property
    def p_value(self) -> float:
        return permutation_p_value(self.observed, self.null_samples, self.null_centre)

    def to_dict(self) -> dict:
        return {
            "observed": float(self.observed),
            "null_samples": self.null_samples,
            "p_value": self.p_value,
            "test_kind": self.test_kind.value,
            "shuffle_target": self.shuffle_target.value,
            "block_len": int(self.block_len),
            "n_permutations": self.n_permutations,
            "rng_seed": self.rng_seed,
            "null_centre": self.null_centre,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PermutationTestResult":
        return cls(observed=doc["observed"], null_samples=doc["null_samples"],
                   test_kind=doc["test_kind"], shuffle_target=doc["shuffle_target"],
                   block_len=doc["block_len"], rng_seed=doc.get("rng_seed", 0),
                   null_centre=doc.get("null_centre", 0.0))


def permutation_p_value(observed: float, null_samples, centre: float = 0.0) -> float:
    """Two-sided p-value with the observed statistic counted in the null.

    Deviations are measured from ``centre`` (0 unless the null distribution
    is known not to be centred there).
    """
    nulls = np.asarray(null_samples, dtype=float)
    extreme = np.count_nonzero(np.abs(nulls - centre) >= abs(observed - centre))
    return (1 + extreme) / (nulls.size + 1)


def pooled_median(observed: float, null_samples) -> float:
    """Median of the null samples together with the observed value.

    Being a symmetric function of all the exchangeable statistics, it can
    serve as the centre of a two-sided test without affecting its validity.
    """
    return float(np.median(np.append(np.asarray(null_samples, dtype=float), observed)))


# -- surrogates ----------------------------------------------------------------


def _block_starts(n: int, block_len: int) -> np.ndarray:
    return np.arange(0, n, block_len)


def block_permute(series, block_len: int, order) -> np.ndarray:
    """Reassemble ``series`` from its blocks taken in ``order``.

    Blocks are consecutive runs of ``block_len`` samples; a shorter final
    block is kept as it is.
    """
    s = np.asarray(series)
    if block_len > s.size:
        raise ValueError(f"block_len {block_len} exceeds series length {s.size}")
    blocks = np.split(s, _block_starts(s.size, block_len)[1:])
    order = np.asarray(order)
    if sorted(order.tolist()) != list(range(len(blocks))):
        raise ValueError(f"order must be a permutation of range({len(blocks)})")
    return np.concatenate([blocks[i] for i in order])


def block_shuffle(series, block_len: int, rng: np.random.Generator) -> np.ndarray:
    """Randomly reorder the contiguous blocks of ``series``."""
    s = np.asarray(series)
    if int(block_len) != block_len or block_len < 1:
        raise ValueError("block_len must be a positive integer")
    if block_len > s.size:
        raise ValueError(f"block_len {block_len} exceeds series length {s.size}")
    n_blocks = -(-s.size // block_len)
    return block_permute(s, block_len, rng.permutation(n_blocks))


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags ``0..max_lag``."""
    s = np.asarray(series, dtype=float)
    d = s - s.mean()
    denom = float(d @ d)
    if denom <= 0:
        raise ValueError("autocorrelation of a constant series is undefined")
    return np.array([float(d[: d.size - lag] @ d[lag:]) / denom
                     for lag in range(max_lag + 1)])


def estimate_block_length(series) -> int:
    """One more than the first lag where the autocorrelation falls below 1/e,
    capped at a quarter of the series length."""
    s = np.asarray(series, dtype=float)
    if s.size < 4:
        raise ValueError("need at least 4 samples to estimate a block length")
    cap = max(1, s.size // 4)
    acf = autocorrelation(s, s.size - 1)
    below = np.flatnonzero(acf[1:] < math.exp(-1.0))
    if below.size == 0:
        return cap
    return int(min(below[0] + 1 + 1, cap))


def _auto_block_len(spec: BlockSpec, *series) -> int:
    if spec.block_len is not None:
        return int(spec.block_len)
    return max(estimate_block_length(s) for s in series)


# -- tests ---------------------------------------------------------------------


def test_mi_nonzero(data: PairedSeries, cfg: EstimatorConfig = EstimatorConfig(),
                    spec: BlockSpec = BlockSpec()) -> PermutationTestResult:
    """Is the MI of ``data`` nonzero? Nulls block-shuffle ``x`` against ``y``."""
    block_len = _auto_block_len(spec, data.x, data.y)
    if block_len > data.n:
        raise ValueError(f"block_len {block_len} exceeds series length {data.n}")
    observed = estimate_mi(data, cfg).mean
    nulls = np.empty(spec.n_permutations)
    for i in range(spec.n_permutations):
        shuffled = block_shuffle(data.x, block_len, spec.replicate_rng(i))
        nulls[i] = estimate_mi(data.with_x(shuffled), cfg).mean
    return PermutationTestResult(observed, nulls, TestKind.MI_NONZERO,
                                 ShuffleTarget.NOT_APPLICABLE, block_len,
                                 spec.rng_seed)


def block_means(values, block_len: int) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    starts = _block_starts(v.size, block_len)
    sizes = np.diff(np.append(starts, v.size))
    return np.add.reduceat(v, starts) / sizes


def _random_labels(rng, n_total: int, p_first: float) -> np.ndarray:
    # independent per-block assignment; both groups must be non-empty
    while True:
        labels = rng.random(n_total) < p_first
        if 0 < np.count_nonzero(labels) < n_total:
            return labels


def test_mi_difference(data_a: PairedSeries, data_b: PairedSeries,
                       cfg: EstimatorConfig = EstimatorConfig(),
                       spec: BlockSpec = BlockSpec()) -> PermutationTestResult:
    """Is ``I(a) - I(b)`` nonzero? Sign-flip test on block-averaged local MI.

    Each block is relabelled independently, choosing system ``a`` with
    probability equal to the fraction of blocks that came from ``a``.
    """
    block_len = _auto_block_len(spec, data_a.x, data_a.y, data_b.x, data_b.y)
    if block_len > min(data_a.n, data_b.n):
        raise ValueError("block_len exceeds the length of an input series")
    means_a = block_means(estimate_mi(data_a, cfg).locals, block_len)
    means_b = block_means(estimate_mi(data_b, cfg).locals, block_len)
    if means_a.size + means_b.size < 2:
        raise ValueError("need at least 2 blocks in total")

    # evaluate in a canonical system order so that swapping the inputs only
    # flips the sign of every statistic
    key_a = (means_a.size, means_a.tobytes())
    key_b = (means_b.size, means_b.tobytes())
    sign = 1.0
    if key_b < key_a:
        means_a, means_b, sign = means_b, means_a, -1.0

    observed = means_a.mean() - means_b.mean()
    pooled = np.concatenate([means_a, means_b])
    p_first = means_a.size / pooled.size
    nulls = np.empty(spec.n_permutations)
    for i in range(spec.n_permutations):
        labels = _random_labels(spec.replicate_rng(i), pooled.size, p_first)
        nulls[i] = pooled[labels].mean() - pooled[~labels].mean()
    return PermutationTestResult(sign * observed, sign * nulls,
                                 TestKind.MI_DIFFERENCE,
                                 ShuffleTarget.NOT_APPLICABLE, block_len,
                                 spec.rng_seed)


def test_cross_mi_nonzero(test: PairedSeries, reference: PairedSeries,
                          shuffle_target=ShuffleTarget.TEST,
                          cfg: EstimatorConfig = EstimatorConfig(),
                          spec: BlockSpec = BlockSpec()) -> PermutationTestResult:
    """Is the cross MI of ``test`` under ``reference`` nonzero?

    Nulls block-shuffle ``x`` of the test series, or of the reference series
    when too few test samples exist (e.g. a single online point).

    Shuffled test samples fall off the reference relationship, so their
    cross MI is typically far below zero. The two-sided comparison is
    therefore centred on the median of the null and observed values rather
    than on zero.
    """
    target = ShuffleTarget(shuffle_target)
    if target is ShuffleTarget.NOT_APPLICABLE:
        raise ValueError("shuffle_target must be TEST or REFERENCE")
    shuffled_series = test if target is ShuffleTarget.TEST else reference
    if target is ShuffleTarget.TEST and test.n < 4 and spec.block_len is None:
        raise ValueError(
            f"only {test.n} test samples: shuffle the REFERENCE instead")
    block_len = _auto_block_len(spec, shuffled_series.x, shuffled_series.y)
    if target is ShuffleTarget.TEST and test.n < 2 * block_len:
        raise ValueError(
            f"only {test.n} test samples for block_len {block_len}: "
            "shuffle the REFERENCE instead")
    if block_len > shuffled_series.n:
        raise ValueError("block_len exceeds the length of the shuffled series")

    observed = estimate_cross_mi(test, reference, cfg).mean
    nulls = np.empty(spec.n_permutations)
    for i in range(spec.n_permutations):
        rng = spec.replicate_rng(i)
        surrogate = shuffled_series.with_x(block_shuffle(shuffled_series.x, block_len, rng))
        if target is ShuffleTarget.TEST:
            nulls[i] = estimate_cross_mi(surrogate, reference, cfg).mean
        else:
            nulls[i] = estimate_cross_mi(test, surrogate, cfg).mean
    return PermutationTestResult(observed, nulls, TestKind.CROSS_MI_NONZERO,
                                 target, block_len, spec.rng_seed,
                                 pooled_median(observed, nulls))


# keep pytest from collecting the public test functions above
for _fn in (test_mi_nonzero, test_mi_difference, test_cross_mi_nonzero):
    _fn.__test__ = False


# -- support -------------------------------------------------------------------


def _nearest_positive(tree: cKDTree, points: np.ndarray, n_ref: int) -> np.ndarray:
    """Max-norm distance from each point to its nearest non-identical
    reference point."""
    out = np.full(points.shape[0], np.nan)
    todo = np.arange(points.shape[0])
    m = min(2, n_ref)
    while todo.size:
        dist, _ = tree.query(points[todo], k=m, p=np.inf)
        dist = dist.reshape(todo.size, m)
        positive = dist > 0
        found = positive.any(axis=1)
        first = np.argmax(positive, axis=1)
        out[todo[found]] = dist[found, first[found]]
        todo = todo[~found]
        if todo.size and m == n_ref:
            raise ValueError("all reference points coincide")
        m = min(2 * m, n_ref)
    return out


def support_distances(test: PairedSeries, reference: PairedSeries):
    """Nearest-reference distances for test points and within the reference.

    Both ignore reference points identical to the query point.
    """
    if reference.n < 2:
        raise ValueError("reference needs at least 2 samples")
    ref = reference.joint()
    tree = cKDTree(ref)
    return (_nearest_positive(tree, test.joint(), reference.n),
            _nearest_positive(tree, ref, reference.n))


def support_diagnostic(test: PairedSeries, reference: PairedSeries) -> float:
    """Mean test-to-reference nearest-neighbour distance over the mean
    reference-to-reference one. Values well above 1 suggest the test data
    lie outside the support of the reference."""
    test_nn, ref_nn = support_distances(test, reference)
    return float(test_nn.mean() / ref_nn.mean())
