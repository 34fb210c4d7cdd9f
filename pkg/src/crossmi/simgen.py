"""Seeded generators for the simulation regimes.

All generators are pure functions of their arguments; the same seed gives
byte-identical output.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Optional, Sequence

import numpy as np

from .dataset import ConditionedDataset, EstimatorConfig, PairedSeries
from .estimators import cross_ksg_mi, ksg_mi

AR_BURN_IN = 100


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_range(low: float, high: float):
    if not low < high:
        raise ValueError(f"inverted or empty range [{low}, {high}]")


def _check_n(n: int, minimum: int = 1):
    if int(n) != n or n < minimum:
        raise ValueError(f"n must be an integer >= {minimum}, got {n}")


def gen_linear(n: int, slope: float, intercept: float, noise_std: float,
               x_low: float, x_high: float, seed) -> PairedSeries:
    """``x ~ U[x_low, x_high]``, ``y = slope * x + intercept + N(0, noise_std^2)``."""
    _check_n(n)
    _check_range(x_low, x_high)
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    rng = _rng(seed)
    x = rng.uniform(x_low, x_high, n)
    y = slope * x + intercept + noise_std * rng.standard_normal(n)
    return PairedSeries(x, y)


def _draw_marginal(params: dict, n: int, rng) -> np.ndarray:
    dist = params.get("dist", "normal")
    if dist == "uniform":
        _check_range(params["low"], params["high"])
        return rng.uniform(params["low"], params["high"], n)
    if dist == "normal":
        std = params.get("std", 1.0)
        if std < 0:
            raise ValueError("std must be nonnegative")
        return params.get("mean", 0.0) + std * rng.standard_normal(n)
    raise ValueError(f"unknown marginal distribution {dist!r}")


def gen_independent(n: int, x_params: dict, y_params: dict, seed) -> PairedSeries:
    """Independent ``x`` and ``y`` with the given marginals.

    Each params dict is ``{"dist": "uniform", "low": a, "high": b}`` or
    ``{"dist": "normal", "mean": m, "std": s}``.
    """
    _check_n(n)
    rng = _rng(seed)
    x = _draw_marginal(x_params, n, rng)
    y = _draw_marginal(y_params, n, rng)
    return PairedSeries(x, y)


def gen_sinusoidal(n: int, amplitude: float, frequency: float, noise_std: float,
                   x_low: float, x_high: float, seed) -> PairedSeries:
    """``x ~ U[x_low, x_high]``, ``y = amplitude * sin(frequency * x) + noise``."""
    _check_n(n)
    _check_range(x_low, x_high)
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    rng = _rng(seed)
    x = rng.uniform(x_low, x_high, n)
    y = amplitude * np.sin(frequency * x) + noise_std * rng.standard_normal(n)
    return PairedSeries(x, y)


def gen_ar1_pair(n: int, ar_coeff: float, coupling: float, noise_std: float,
                 seed) -> PairedSeries:
    """Coupled AR(1) pair.

    ``x_t = a x_{t-1} + e_t`` and ``y_t = a y_{t-1} + c x_t + e'_t``; the first
    100 samples are discarded as burn-in.
    """
    _check_n(n, 10)
    if not abs(ar_coeff) < 1:
        raise ValueError(f"|ar_coeff| must be < 1 for a stationary process, got {ar_coeff}")
    rng = _rng(seed)
    total = n + AR_BURN_IN
    e = noise_std * rng.standard_normal((2, total))
    x = np.empty(total)
    y = np.empty(total)
    x[0], y[0] = e[0, 0], e[1, 0] + coupling * e[0, 0]
    for t in range(1, total):
        x[t] = ar_coeff * x[t - 1] + e[0, t]
        y[t] = ar_coeff * y[t - 1] + coupling * x[t] + e[1, t]
    return PairedSeries(x[AR_BURN_IN:], y[AR_BURN_IN:])


class ConditionKind(str, enum.Enum):
    LINEAR = "LINEAR"
    INDEPENDENT = "INDEPENDENT"
    SINUSOIDAL = "SINUSOIDAL"


@dataclasses.dataclass(frozen=True)
class ConditionSpec:
    """Generator for one system condition.

    ``x`` is uniform on ``x_range`` when given, otherwise normal with
    ``x_mean`` and ``x_std``. Then, by kind:

    * LINEAR: ``y = slope * x + intercept + N(0, noise_std^2)``
    * INDEPENDENT: ``y`` uniform on ``y_range`` when given, otherwise
      ``N(y_offset, noise_std^2)``, independent of ``x``
    * SINUSOIDAL: ``y = y_offset + amplitude * sin(frequency * x) + noise``
    """

    kind: ConditionKind = ConditionKind.LINEAR
    slope: float = 1.0
    intercept: float = 0.0
    x_mean: float = 0.0
    y_offset: float = 0.0
    x_std: float = 1.0
    x_range: Optional[tuple] = None
    y_range: Optional[tuple] = None
    noise_std: float = 0.1
    amplitude: float = 1.0
    frequency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ConditionKind(self.kind))
        if self.noise_std < 0 or self.x_std < 0:
            raise ValueError("standard deviations must be nonnegative")
        if self.kind is ConditionKind.LINEAR and not np.isfinite(self.slope):
            raise ValueError("LINEAR condition needs a finite slope")
        for rng_field in ("x_range", "y_range"):
            value = getattr(self, rng_field)
            if value is not None:
                value = tuple(float(v) for v in value)
                _check_range(*value)
                object.__setattr__(self, rng_field, value)

    @classmethod
    def from_dict(cls, doc: dict) -> "ConditionSpec":
        return cls(**doc)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["kind"] = self.kind.value
        return out

    def sample(self, n: int, seed) -> PairedSeries:
        _check_n(n)
        rng = _rng(seed)
        if self.x_range is not None:
            x = rng.uniform(*self.x_range, n)
        else:
            x = self.x_mean + self.x_std * rng.standard_normal(n)
        noise = self.noise_std * rng.standard_normal(n)
        if self.kind is ConditionKind.LINEAR:
            y = self.slope * x + self.intercept + noise
        elif self.kind is ConditionKind.SINUSOIDAL:
            y = self.y_offset + self.amplitude * np.sin(self.frequency * x) + noise
        elif self.y_range is not None:
            y = rng.uniform(*self.y_range, n)
        else:
            y = self.y_offset + noise
        return PairedSeries(x, y)


@dataclasses.dataclass(frozen=True)
class StateSwitchingSpec:
    conditions: tuple
    samples_per_condition: int = 400
    rng_seed: int = 0

    def __post_init__(self):
        conditions = tuple(c if isinstance(c, ConditionSpec) else ConditionSpec.from_dict(c)
                           for c in self.conditions)
        if not conditions:
            raise ValueError("need at least one condition")
        _check_n(self.samples_per_condition)
        object.__setattr__(self, "conditions", conditions)


def gen_state_switching(spec: StateSwitchingSpec) -> ConditionedDataset:
    """Concatenate per-condition draws in order; labels are 1-based indices."""
    parts, labels = [], []
    for i, cond in enumerate(spec.conditions, start=1):
        parts.append(cond.sample(spec.samples_per_condition, [spec.rng_seed, i]))
        labels.extend([i] * spec.samples_per_condition)
    x = np.concatenate([p.x for p in parts])
    y = np.concatenate([p.y for p in parts])
    return ConditionedDataset(PairedSeries(x, y), labels)


@dataclasses.dataclass(frozen=True)
class ScalingRow:
    n_test: int
    I_p: float
    I_q: float
    CI_pq: float


def scaling_experiment(reference_spec: ConditionSpec, test_spec: ConditionSpec,
                       test_sizes: Sequence[int],
                       include_test_in_reference: bool = True,
                       cfg: EstimatorConfig = EstimatorConfig(), seed=0,
                       n_reference: int = 2000) -> list:
    """MI of test and reference and the cross MI, across test-set sizes.

    The reference is drawn once; each test size gets an independent test
    draw. With ``include_test_in_reference`` the test samples are pooled into
    the reference before the reference distribution is estimated.
    """
    sizes = list(test_sizes)
    if not sizes:
        raise ValueError("test_sizes must not be empty")
    for n in sizes:
        if n < cfg.k + 1:
            raise ValueError(f"test size {n} is below k + 1 = {cfg.k + 1}")
    reference = reference_spec.sample(n_reference, [seed, 0])
    rows = []
    for n in sizes:
        test = test_spec.sample(n, [seed, 1, n])
        q = reference.concat(test) if include_test_in_reference else reference
        rows.append(ScalingRow(
            n_test=n,
            I_p=ksg_mi(test, cfg).mean,
            I_q=ksg_mi(q, cfg).mean,
            CI_pq=cross_ksg_mi(test, q, cfg).mean,
        ))
    return rows
