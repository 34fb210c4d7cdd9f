"""Series containers, estimator configuration and file I/O.

Every estimator in the package consumes a :class:`PairedSeries` (or a
:class:`TripleSeries` for conditional measures) and every result is written
through :func:`write_results_json`, which emits the shared
``{"kind", "config", "result"}`` document.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import json
import math
from collections import Counter
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

LN2 = math.log(2.0)


class DatasetError(ValueError):
    """Raised for malformed series or unreadable input files."""


def _as_finite_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DatasetError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DatasetError("empty series")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise DatasetError(f"{name} contains a non-finite value at index {bad}")
    arr.setflags(write=False)
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class PairedSeries:
    """Ordered samples ``(x_t, y_t)`` of two real-valued variables."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_finite_vector(self.x, "x")
        y = _as_finite_vector(self.y, "y")
        if x.size != y.size:
            raise DatasetError(f"x and y differ in length ({x.size} != {y.size})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.x.size

    @property
    def n(self) -> int:
        return self.x.size

    def joint(self) -> np.ndarray:
        """Samples as an ``(N, 2)`` array."""
        return np.column_stack([self.x, self.y])

    def take(self, index) -> "PairedSeries":
        index = np.asarray(index)
        return PairedSeries(self.x[index], self.y[index])

    def with_x(self, x) -> "PairedSeries":
        return PairedSeries(x, self.y)

    def concat(self, other: "PairedSeries") -> "PairedSeries":
        return PairedSeries(np.concatenate([self.x, other.x]),
                            np.concatenate([self.y, other.y]))

    def equals(self, other: "PairedSeries") -> bool:
        return (np.array_equal(self.x, other.x)
                and np.array_equal(self.y, other.y))


@dataclasses.dataclass(frozen=True, eq=False)
class TripleSeries:
    """Samples ``(x_t, y_t, z_t)``; ``z`` is the conditioning variable."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        arrays = [_as_finite_vector(getattr(self, name), name) for name in "xyz"]
        if len({a.size for a in arrays}) != 1:
            raise DatasetError("x, y and z must have equal lengths")
        for name, arr in zip("xyz", arrays):
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.x.size

    @property
    def n(self) -> int:
        return self.x.size

    def pair(self) -> PairedSeries:
        return PairedSeries(self.x, self.y)


@dataclasses.dataclass(frozen=True, eq=False)
class ConditionedDataset:
    """A paired series partitioned into system conditions.

    ``weights`` maps each condition label to its relative weight; when not
    supplied the empirical label frequencies are used.
    """

    samples: PairedSeries
    labels: tuple
    weights: Mapping[Any, float] = None

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) != len(self.samples):
            raise DatasetError(
                f"{len(labels)} labels for {len(self.samples)} samples")
        weights = self.weights
        if weights is None:
            counts = Counter(labels)
            weights = {lab: counts[lab] / len(labels) for lab in counts}
        weights = dict(weights)
        if any(not 0.0 <= w <= 1.0 for w in weights.values()):
            raise DatasetError("condition weights must lie in [0, 1]")
        if abs(math.fsum(weights.values()) - 1.0) > 1e-12:
            raise DatasetError("condition weights must sum to 1")
        missing = set(labels) - set(weights)
        if missing:
            raise DatasetError(f"labels without a weight: {sorted(map(str, missing))}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    @property
    def conditions(self) -> list:
        """Condition labels in order of first appearance."""
        return list(dict.fromkeys(self.labels))

    def condition(self, label) -> PairedSeries:
        mask = np.array([lab == label for lab in self.labels])
        if not mask.any():
            raise KeyError(label)
        return self.samples.take(np.flatnonzero(mask))

    def split(self) -> dict:
        return {lab: self.condition(lab) for lab in self.conditions}


class Backend(str, enum.Enum):
    KSG = "KSG"
    GAUSSIAN = "Gaussian"


@dataclasses.dataclass(frozen=True)
class EstimatorConfig:
    """Estimator settings.

    ``noise_amplitude`` is relative: the jitter added to each dimension is
    uniform on ``[-a, a]`` with ``a = noise_amplitude * std`` of that
    dimension in the reference data. With ``normalise`` every dimension of
    test and reference is standardised by the reference mean and standard
    deviation before the neighbour search.
    """

    backend: Backend = Backend.KSG
    k: int = 4
    noise_amplitude: float = 1e-8
    rng_seed: int = 0
    normalise: bool = True

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not self.noise_amplitude >= 0:
            raise ValueError("noise_amplitude must be nonnegative")

    def replace(self, **changes) -> "EstimatorConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {"backend": self.backend.value, "k": self.k,
                "noise_amplitude": self.noise_amplitude,
                "rng_seed": self.rng_seed, "normalise": self.normalise}


def read_paired_csv(path, x_col: str, y_col: str) -> PairedSeries:
    """Read two named numeric columns from a CSV file with a header row."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DatasetError(f"{path}: empty file")
        for col in (x_col, y_col):
            if col not in reader.fieldnames:
                raise DatasetError(f"{path}: missing column {col!r}")
        xs, ys = [], []
        # row 1 is the first data row
        for row_number, row in enumerate(reader, start=1):
            for col, out in ((x_col, xs), (y_col, ys)):
                cell = row[col]
                try:
                    value = float(cell)
                except (TypeError, ValueError):
                    raise DatasetError(
                        f"{path}: non-numeric value {cell!r} in column "
                        f"{col!r} at row {row_number}") from None
                out.append(value)
    if not xs:
        raise DatasetError(f"{path}: empty series")
    return PairedSeries(xs, ys)


def write_paired_csv(path, data: PairedSeries, x_col: str = "x",
                     y_col: str = "y", extra: Mapping[str, Sequence] = None):
    columns = {x_col: data.x, y_col: data.y}
    columns.update(extra or {})
    write_columns_csv(path, columns)


def write_columns_csv(path, columns: Mapping[str, Sequence]):
    names = list(columns)
    cols = [list(columns[n]) for n in names]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*cols):
            writer.writerow([_format_cell(v) for v in row])


def _format_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def to_jsonable(obj):
    """Convert results and configs into plain JSON types.

    Floats pass through unchanged; ``json`` writes them with ``repr`` so they
    round-trip exactly.
    """
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if not math.isfinite(value):
            raise ValueError(f"cannot serialise non-finite value {value}")
        return value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


_INFO_KEY_SUFFIX = "_nats"


def convert_units(payload, bits: bool):
    """Rescale every ``*_nats`` entry (and ``locals``/``null_samples``) to bits.

    Keys are renamed to ``*_bits``; other fields are left alone.
    """
    if not bits:
        return payload
    if isinstance(payload, dict):
        out = {}
        for key, value in payload.items():
            if key.endswith(_INFO_KEY_SUFFIX):
                out[key[: -len(_INFO_KEY_SUFFIX)] + "_bits"] = _scale(value)
            elif key in ("locals", "null_samples", "observed"):
                out[key] = _scale(value)
            else:
                out[key] = convert_units(value, bits)
        return out
    if isinstance(payload, list):
        return [convert_units(v, bits) for v in payload]
    return payload


def _scale(value):
    if isinstance(value, list):
        return [_scale(v) for v in value]
    if value is None:
        return None
    return value / LN2


def write_results_json(path, payload, kind: str = None, config=None,
                       bits: bool = False):
    """Write ``payload`` as ``{"kind": ..., "config": ..., "result": ...}``.

    ``payload`` may be any result type exposing ``to_dict`` (its ``kind``
    attribute supplies the default document kind) or a plain mapping.
    """
    if kind is None:
        kind = getattr(payload, "kind", type(payload).__name__)
    result = convert_units(to_jsonable(payload), bits)
    doc = {"kind": kind, "config": to_jsonable(config or {}), "result": result}
    if bits:
        doc["units"] = "bits"
    else:
        doc["units"] = "nats"
    text = json.dumps(doc, indent=2, allow_nan=False)
    try:
        Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_results_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
