"""Cross transfer entropy and cross active information storage.

Both are cross (conditional) MI estimates on time-delay embeddings; the
embedding is built identically for test and reference.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..dataset import EstimatorConfig, PairedSeries
from ._types import LocalInfoSeries
from .ksg import cross_ksg_cmi_arrays, cross_ksg_mi_arrays


def embed_history(series, history_len: int):
    """Pair each ``s[t]`` (t >= history_len) with ``s[t-history_len:t]``.

    Returns ``(past, present)`` with shapes ``(n - L, L)`` and ``(n - L,)``.
    """
    s = np.asarray(series, dtype=float)
    if int(history_len) != history_len or history_len < 1:
        raise ValueError("history_len must be a positive integer")
    if s.size <= history_len:
        raise ValueError(
            f"series of length {s.size} is too short for history {history_len}")
    past = sliding_window_view(s, history_len)[:-1]
    return past, s[history_len:]


def _check_length(n: int, history_len: int, k: int, what: str):
    if n <= history_len + k:
        raise ValueError(
            f"{what} series of length {n} is too short for history_len="
            f"{history_len} and k={k}")


def transfer_entropy_embedding(data: PairedSeries, history_len: int):
    """Triples ``(x_{<t}, y_t, y_{<t})`` for transfer entropy from x to y."""
    x_past, _ = embed_history(data.x, history_len)
    y_past, y_now = embed_history(data.y, history_len)
    return x_past, y_now, y_past


def cross_transfer_entropy(test: PairedSeries, reference: PairedSeries,
                           history_len: int = 1,
                           cfg: EstimatorConfig = EstimatorConfig(),
                           exclude_self: bool = False) -> LocalInfoSeries:
    """Transfer entropy x -> y of the test series under the reference dynamics.

    Local values are ``i(x_{<t}; y_t | y_{<t})`` for each embedded test time
    step, estimated with the conditional cross-KSG estimator.
    """
    _check_length(test.n, history_len, 0, "test")
    _check_length(reference.n, history_len, cfg.k, "reference")
    tx, ty, tz = transfer_entropy_embedding(test, history_len)
    rx, ry, rz = transfer_entropy_embedding(reference, history_len)
    return cross_ksg_cmi_arrays(tx, ty, tz, rx, ry, rz, cfg, exclude_self)


def transfer_entropy(data: PairedSeries, history_len: int = 1,
                     cfg: EstimatorConfig = EstimatorConfig()) -> LocalInfoSeries:
    return cross_transfer_entropy(data, data, history_len, cfg, exclude_self=True)


def cross_active_information_storage(test, reference, history_len: int = 1,
                                     cfg: EstimatorConfig = EstimatorConfig(),
                                     exclude_self: bool = False) -> LocalInfoSeries:
    """Active information storage ``i(x_t; x_{<t})`` of a univariate test
    series under the reference process."""
    test = np.asarray(test, dtype=float)
    reference = np.asarray(reference, dtype=float)
    _check_length(test.size, history_len, 0, "test")
    _check_length(reference.size, history_len, cfg.k, "reference")
    t_past, t_now = embed_history(test, history_len)
    r_past, r_now = embed_history(reference, history_len)
    return cross_ksg_mi_arrays(t_past, t_now, r_past, r_now, cfg, exclude_self)


def active_information_storage(series, history_len: int = 1,
                               cfg: EstimatorConfig = EstimatorConfig()) -> LocalInfoSeries:
    return cross_active_information_storage(series, series, history_len, cfg,
                                            exclude_self=True)
