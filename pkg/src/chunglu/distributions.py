"""Degree distributions, weight sequences and the proportional L1 error."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _coerce(value) -> Real:
    if isinstance(value, (int, Fraction, Decimal)):
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    return float(value)


def _is_integral(value) -> bool:
    if isinstance(value, int):
        return True
    if isinstance(value, Decimal):
        return value == value.to_integral_value()
    if isinstance(value, Fraction):
        return value.denominator == 1
    return float(value).is_integer()


@dataclass(frozen=True)
class DegreeDistribution:
    """Node counts per degree class ``k = 1..m``.

    ``counts[k - 1]`` is the number of nodes with (expected) degree ``k``.
    Entries may be ints, floats, ``Decimal`` or ``Fraction``; extended
    precision values are kept as given so the inverse can use them exactly.

    ``zero_degree`` and ``overflow`` carry the nodes excluded from the
    counts when the distribution was observed from a graph.
    """

    counts: tuple
    zero_degree: float = field(default=0, compare=False)
    overflow: float = field(default=0, compare=False)

    def __post_init__(self):
        counts = tuple(_coerce(c) for c in self.counts)
        for c in counts:
            if isinstance(c, float) and not math.isfinite(c):
                raise ValueError(f"non-finite count {c!r}")
            if c < 0:
                raise ValueError(f"counts must be non-negative, got {c!r}")
        object.__setattr__(self, "counts", counts)

    @property
    def m(self) -> int:
        return len(self.counts)

    @property
    def total_nodes(self):
        return sum(self.counts)

    def is_integral(self) -> bool:
        return all(_is_integral(c) for c in self.counts)

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.counts], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __getitem__(self, k):
        return self.counts[k]

    @classmethod
    def from_csv(cls, path: str | Path) -> "DegreeDistribution":
        return parse_csv(Path(path).read_text(encoding="utf-8"))

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["degree", "count"])
        for k, c in enumerate(self.counts, start=1):
            writer.writerow([k, _format_number(c)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def _format_number(value) -> str:
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value)


def _parse_number(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        # Decimal keeps every digit a high-precision target was written with.
        return Decimal(text)


def parse_csv(text: str) -> DegreeDistribution:
    """Parse the ``degree,count`` file format.

    Degrees must be positive and strictly ascending; classes missing between
    1 and the largest degree are filled with zero.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ValueError("empty degree distribution file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["degree", "count"]:
        raise ValueError(f"expected header 'degree,count', got {rows[0]!r}")
    pairs = []
    last = 0
    for row in rows[1:]:
        k = int(row[0])
        if k < 1:
            raise ValueError(f"degree classes start at 1, got {k}")
        if k <= last:
            raise ValueError("degrees must be strictly ascending")
        last = k
        pairs.append((k, _parse_number(row[1])))
    counts = [0] * last
    for k, c in pairs:
        counts[k - 1] = c
    return DegreeDistribution(tuple(counts))


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Per-node expected degrees ``w_i`` for the Chung-Lu generator."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if w.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return len(self.weights)


def round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def power_law_distribution(N: float, beta: float, m: int) -> DegreeDistribution:
    """Counts ``round(N * k**-beta)`` for ``k = 1..m``, zeros kept."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if N < 0 or beta < 0:
        raise ValueError("N and beta must be non-negative")
    return DegreeDistribution(tuple(round_half_up(N * k ** (-beta)) for k in range(1, m + 1)))


def expand_to_weights(d: DegreeDistribution) -> WeightSequence:
    """One weight ``k`` per node of class ``k``, largest weights first."""
    if not d.is_integral():
        raise ValueError(
            "distribution has fractional counts; round it (e.g. with round_int) "
            "before expanding to node weights"
        )
    counts = np.array([int(c) for c in d.counts], dtype=np.int64)
    degrees = np.arange(1, d.m + 1, dtype=np.float64)
    return WeightSequence(np.repeat(degrees[::-1], counts[::-1]))


def weights_to_distribution(w: WeightSequence | Sequence[float], m: int) -> DegreeDistribution:
    """Re-bin integer weights by value; inverse of :func:`expand_to_weights`."""
    arr = np.asarray(w.weights if isinstance(w, WeightSequence) else w, dtype=np.float64)
    ints = np.rint(arr).astype(np.int64)
    if np.any(ints != arr):
        raise ValueError("weights are not integral")
    counts = np.bincount(ints, minlength=m + 1)[1 : m + 1]
    return DegreeDistribution(tuple(int(c) for c in counts))


def proportional_l1_error(target: DegreeDistribution | Iterable[float],
                          observed: DegreeDistribution | Iterable[float]) -> float:
    """``||target - observed||_1 / ||target||_1`` over classes 1..m."""
    t = target.as_array() if isinstance(target, DegreeDistribution) else np.asarray(
        [float(v) for v in target], dtype=np.float64)
    o = observed.as_array() if isinstance(observed, DegreeDistribution) else np.asarray(
        [float(v) for v in observed], dtype=np.float64)
    if t.shape != o.shape:
        raise ValueError(f"length mismatch: {t.shape[0]} vs {o.shape[0]}")
    norm = np.abs(t).sum()
    if norm == 0:
        raise ValueError("target has zero L1 norm; proportional error undefined")
    return float(np.abs(t - o).sum() / norm)
