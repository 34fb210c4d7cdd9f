"""Kraskov-Stoegbauer-Grassberger (KSG) estimators, algorithm 1.

All estimators here share one neighbour-search core. For every test point
the radius ``eps`` is the max-norm distance to its k-th nearest neighbour in
the joint space of the *reference* samples, and the marginal (or
sub-space) counts are the numbers of reference samples strictly closer than
``eps`` in that sub-space. For plain MI the test set is the reference set
itself with each point excluded from its own neighbourhood.

References
----------
Kraskov, A., Stoegbauer, H., Grassberger, P. (2004). Estimating mutual
information. Phys. Rev. E 69, 066138.
Frenzel, S., Pompe, B. (2007). Partial mutual information for coupling
analysis of multivariate time series. Phys. Rev. Lett. 99, 204101.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..dataset import Backend, EstimatorConfig, PairedSeries, TripleSeries
from ._types import LocalInfoSeries
from .digamma import digamma

# Above this many reference points the k-d tree path is used; below it a
# chunked brute-force scan is faster. Both return identical radii/counts.
TREE_MIN_REFERENCE = 600
_CHUNK_PAIRS = 1 << 20


class DuplicatePointsError(ValueError):
    """A test point has ``k`` reference neighbours at distance zero."""


def _as_block(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"expected 1-D or 2-D samples, got shape {arr.shape}")
    return arr


def jitter_offsets(n: int, dims: int, seed: int) -> np.ndarray:
    """Uniform ``[-1, 1)`` offsets; row ``i`` depends only on ``(seed, i)``.

    Philox is counter-based and fills the array in C order, so the offsets of
    a point never depend on how many points are drawn or in which process.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed) % (1 << 64)))
    return 2.0 * gen.random((n, dims)) - 1.0


def _jitter(block: np.ndarray, scale: np.ndarray, seed: int) -> np.ndarray:
    if not np.any(scale):
        return block
    return block + scale * jitter_offsets(block.shape[0], block.shape[1], seed)


def _jitter_scale(reference: np.ndarray, amplitude: float) -> np.ndarray:
    std = reference.std(axis=0)
    std[std == 0] = 1.0
    return amplitude * std


def _chebyshev(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise max-norm distances between rows of ``a`` and rows of ``b``."""
    dist = np.abs(a[:, None, 0] - b[None, :, 0])
    for j in range(1, a.shape[1]):
        np.maximum(dist, np.abs(a[:, None, j] - b[None, :, j]), out=dist)
    return dist


def _radius_brute(test, ref, k, exclude_self):
    n_test = test.shape[0]
    eps = np.empty(n_test)
    step = max(1, _CHUNK_PAIRS // max(ref.shape[0], 1))
    for start in range(0, n_test, step):
        stop = min(start + step, n_test)
        dist = _chebyshev(test[start:stop], ref)
        if exclude_self:
            rows = np.arange(stop - start)
            dist[rows, rows + start] = np.inf
        eps[start:stop] = np.partition(dist, k - 1, axis=1)[:, k - 1]
    return eps


def _counts_brute(test, ref, eps):
    n_test = test.shape[0]
    counts = np.empty(n_test, dtype=np.int64)
    step = max(1, _CHUNK_PAIRS // max(ref.shape[0], 1))
    for start in range(0, n_test, step):
        stop = min(start + step, n_test)
        dist = _chebyshev(test[start:stop], ref)
        counts[start:stop] = np.count_nonzero(dist < eps[start:stop, None], axis=1)
    return counts


def _radius_tree(test, ref, k, exclude_self):
    tree = cKDTree(ref)
    kk = k + 1 if exclude_self else k
    dist, _ = tree.query(test, k=[kk], p=np.inf)
    return dist[:, 0]


def _counts_tree(test, ref, eps):
    tree = cKDTree(ref)
    # cKDTree counts distances <= r; the largest double below eps gives "< eps".
    radius = np.nextafter(eps, 0.0)
    return np.asarray(tree.query_ball_point(test, radius, p=np.inf,
                                            return_length=True), dtype=np.int64)


def neighbour_counts(test_blocks, ref_blocks, subspaces, k: int,
                     exclude_self: bool = False):
    """Joint k-NN radius and strict sub-space neighbour counts.

    Parameters
    ----------
    test_blocks, ref_blocks : sequence of (n, d_i) arrays
        Variables making up the joint space, in the same order for test and
        reference.
    subspaces : sequence of tuples of block indices
        Each tuple names the variables forming a sub-space to count in.
    k : int
        Neighbour rank defining the radius.
    exclude_self : bool
        Treat test point ``i`` as reference point ``i`` and leave it out of
        its own neighbour search and counts.

    Returns
    -------
    eps : ndarray, shape (n_test,)
    counts : list of int ndarrays, one per sub-space
    """
    test_joint = np.hstack(test_blocks)
    ref_joint = np.hstack(ref_blocks)
    n_ref = ref_joint.shape[0]
    use_tree = n_ref >= TREE_MIN_REFERENCE
    radius = _radius_tree if use_tree else _radius_brute
    count = _counts_tree if use_tree else _counts_brute

    eps = radius(test_joint, ref_joint, k, exclude_self)
    if np.any(eps <= 0):
        bad = int(np.flatnonzero(eps <= 0)[0])
        raise DuplicatePointsError(
            f"test point {bad} has {k} reference neighbours at distance 0; "
            "add jitter (noise_amplitude > 0) or remove duplicates")
    counts = []
    for sub in subspaces:
        t = np.hstack([test_blocks[i] for i in sub])
        r = np.hstack([ref_blocks[i] for i in sub])
        c = count(t, r, eps)
        if exclude_self:
            c = c - 1
        counts.append(c)
    return eps, counts


def _prepare(test_blocks, ref_blocks, cfg: EstimatorConfig, exclude_self: bool):
    test_blocks = [_as_block(b) for b in test_blocks]
    ref_blocks = [_as_block(b) for b in ref_blocks]
    n_test = test_blocks[0].shape[0]
    n_ref = ref_blocks[0].shape[0]
    if any(b.shape[0] != n_test for b in test_blocks) or any(
            b.shape[0] != n_ref for b in ref_blocks):
        raise ValueError("all variables must have the same number of samples")
    if n_test < 1:
        raise ValueError("at least one test sample is required")
    if exclude_self and n_test != n_ref:
        raise ValueError("exclude_self requires test and reference of equal length")
    # with self exclusion only n_ref - 1 candidates remain
    available = n_ref - 1 if exclude_self else n_ref
    if cfg.k > available or n_ref <= cfg.k:
        raise ValueError(
            f"reference has {n_ref} samples; need more than k={cfg.k}")
    if not (cfg.normalise or cfg.noise_amplitude > 0):
        return test_blocks, ref_blocks
    test_joint = np.hstack(test_blocks)
    ref_joint = np.hstack(ref_blocks)
    if cfg.normalise:
        centre = ref_joint.mean(axis=0)
        spread = ref_joint.std(axis=0)
        spread[spread == 0] = 1.0
        test_joint = (test_joint - centre) / spread
        ref_joint = (ref_joint - centre) / spread
    if cfg.noise_amplitude > 0:
        scale = _jitter_scale(ref_joint, cfg.noise_amplitude)
        test_joint = _jitter(test_joint, scale, cfg.rng_seed)
        ref_joint = _jitter(ref_joint, scale, cfg.rng_seed)
    return _split(test_joint, test_blocks), _split(ref_joint, ref_blocks)


def _split(joint, like):
    edges = np.cumsum([b.shape[1] for b in like])[:-1]
    return np.split(joint, edges, axis=1)


def _require_ksg(cfg: EstimatorConfig):
    if cfg.backend is not Backend.KSG:
        raise ValueError(f"KSG estimator called with backend {cfg.backend.value}")


def cross_ksg_mi_arrays(test_x, test_y, ref_x, ref_y,
                        cfg: EstimatorConfig = EstimatorConfig(),
                        exclude_self: bool = False) -> LocalInfoSeries:
    """Cross MI of test samples under the reference distribution.

    ``x`` and ``y`` may be 1-D or ``(n, d)`` arrays (e.g. embedded histories).
    """
    _require_ksg(cfg)
    test_blocks, ref_blocks = _prepare([test_x, test_y], [ref_x, ref_y],
                                       cfg, exclude_self)
    n_ref = ref_blocks[0].shape[0]
    _, (nx, ny) = neighbour_counts(test_blocks, ref_blocks, [(0,), (1,)],
                                   cfg.k, exclude_self)
    local = digamma(cfg.k) + digamma(n_ref) - digamma(nx + 1) - digamma(ny + 1)
    return LocalInfoSeries(local, Backend.KSG, n_reference=n_ref, k=cfg.k)


def cross_ksg_cmi_arrays(test_x, test_y, test_z, ref_x, ref_y, ref_z,
                         cfg: EstimatorConfig = EstimatorConfig(),
                         exclude_self: bool = False) -> LocalInfoSeries:
    """Cross conditional MI ``I(x; y | z)`` of test samples under the reference."""
    _require_ksg(cfg)
    test_blocks, ref_blocks = _prepare([test_x, test_y, test_z],
                                       [ref_x, ref_y, ref_z], cfg, exclude_self)
    n_ref = ref_blocks[0].shape[0]
    _, (nz, nxz, nyz) = neighbour_counts(
        test_blocks, ref_blocks, [(2,), (0, 2), (1, 2)], cfg.k, exclude_self)
    local = (digamma(cfg.k) + digamma(nz + 1)
             - digamma(nxz + 1) - digamma(nyz + 1))
    return LocalInfoSeries(local, Backend.KSG, n_reference=n_ref, k=cfg.k)


def cross_ksg_mi(test: PairedSeries, reference: PairedSeries,
                 cfg: EstimatorConfig = EstimatorConfig(),
                 exclude_self: bool = False) -> LocalInfoSeries:
    """Cross mutual information of ``test`` evaluated under ``reference``.

    The k-NN radius and the marginal counts come from the reference samples
    only and ``psi(N)`` uses the reference size. Each test sample is weighted
    equally in the mean.

    With ``exclude_self=True`` test sample ``i`` is taken to be reference
    sample ``i`` and is left out of its own neighbourhood; passing the same
    series twice then reproduces :func:`ksg_mi` exactly.
    """
    return cross_ksg_mi_arrays(test.x, test.y, reference.x, reference.y,
                               cfg, exclude_self)


def ksg_mi(data: PairedSeries, cfg: EstimatorConfig = EstimatorConfig()) -> LocalInfoSeries:
    """KSG mutual information with per-sample local values."""
    return cross_ksg_mi(data, data, cfg, exclude_self=True)


def cross_ksg_cmi(test: TripleSeries, reference: TripleSeries,
                  cfg: EstimatorConfig = EstimatorConfig(),
                  exclude_self: bool = False) -> LocalInfoSeries:
    return cross_ksg_cmi_arrays(test.x, test.y, test.z,
                                reference.x, reference.y, reference.z,
                                cfg, exclude_self)


def ksg_cmi(data: TripleSeries, cfg: EstimatorConfig = EstimatorConfig()) -> LocalInfoSeries:
    """Conditional MI ``I(x; y | z)`` with the Frenzel-Pompe KSG variant."""
    return cross_ksg_cmi(data, data, cfg, exclude_self=True)
