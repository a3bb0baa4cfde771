"""Can a desired output distribution come from a non-negative Chung-Lu input?

The verdict is the sign of ``P^-1 y``.  The remaining checks explain a
verdict rather than decide it:

* per-class bounds ``N min_k P[i,k] <= y_i <= N max_k P[i,k]`` that hold for
  every ``x >= 0`` with ``||x||_1 = N``;
* the hyperplane residual ``(y - (N/m) P 1, omega)`` with ``P^T omega = 1``,
  which vanishes iff ``y`` lies in the image of ``{x : sum(x) = N}``;
* the admissible range ``||y||_1 <= N <= y_m / min_k P[m,k]``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from decimal import Context, Decimal, localcontext
from typing import Sequence

import numpy as np

from .distributions import DegreeDistribution
from .exact_inverse import (
    PrecisionContext,
    apply_inverse_transpose,
    decimal_transfer_matrix,
    shift_input,
)
from .generator import make_rng
from .transfer import build_transfer_matrix

#: Relative slack for the class bounds, which are attained exactly at vertices.
BOUND_RTOL = 1e-12
#: ``min_k P[m,k]`` below this makes the upper end of the N range meaningless.
UNINFORMATIVE_PMIN = 1e-30


def _log_row(i: int, m: int) -> np.ndarray:
    k = np.arange(1, m + 1, dtype=np.float64)
    return i * np.log(k) - k - math.lgamma(i + 1)


def row_extremes(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-row ``(min_k P[i,k], max_k P[i,k])`` for ``i = 1..m``."""
    lows = np.empty(m)
    highs = np.empty(m)
    for i in range(1, m + 1):
        row = _log_row(i, m)
        lows[i - 1] = math.exp(row.min())
        highs[i - 1] = math.exp(row.max())
    return lows, highs


@dataclass(frozen=True)
class ClassBounds:
    ok: tuple
    lower: tuple
    upper: tuple
    margin: tuple  # signed distance to the nearest bound, negative when violated
    diagonal_upper: tuple  # the N * P[i,i] form; differs from ``upper`` only off-diagonal maxima

    @property
    def all_ok(self) -> bool:
        return all(self.ok)


def class_bounds(y, N: float) -> ClassBounds:
    if N <= 0:
        raise ValueError("N must be positive")
    ys = np.array([float(v) for v in (y.counts if isinstance(y, DegreeDistribution) else y)])
    m = len(ys)
    lows, highs = row_extremes(m)
    lower = N * lows
    upper = N * highs
    diag = N * np.array([math.exp(_log_row(i, m)[i - 1]) for i in range(1, m + 1)])
    slack = BOUND_RTOL * np.maximum(np.abs(upper), np.abs(ys))
    ok = (ys >= lower - slack) & (ys <= upper + slack)
    margin = np.minimum(ys - lower, upper - ys)
    return ClassBounds(
        ok=tuple(bool(v) for v in ok),
        lower=tuple(lower.tolist()),
        upper=tuple(upper.tolist()),
        margin=tuple(margin.tolist()),
        diagonal_upper=tuple(diag.tolist()),
    )


def compute_omega(m: int, ctx: PrecisionContext | None = None) -> list[Decimal]:
    """The normal ``omega = (P^-1)^T 1`` of the image hyperplane."""
    if m < 1:
        raise ValueError("m must be at least 1")
    ctx = ctx or PrecisionContext.for_m(m)
    return apply_inverse_transpose([1] * m, ctx)


def omega_residual(omega: Sequence[Decimal], ctx: PrecisionContext) -> Decimal:
    """``||P^T omega - 1||_1`` in extended precision."""
    m = len(omega)
    P = decimal_transfer_matrix(m, ctx)
    with localcontext(ctx.decimal()):
        return sum((abs(sum((P[i][k] * omega[i] for i in range(m)), Decimal(0)) - 1)
                    for k in range(m)), Decimal(0))


def hyperplane_residual(y, N, omega: Sequence[Decimal], ctx: PrecisionContext | None = None) -> Decimal:
    """``(y - (N/m) P 1, omega)``; zero iff ``y = P x`` for some ``x`` summing to ``N``."""
    ys = list(y.counts) if isinstance(y, DegreeDistribution) else list(y)
    m = len(ys)
    if len(omega) != m:
        raise ValueError(f"dimension mismatch: y has {m} classes, omega has {len(omega)}")
    ctx = ctx or PrecisionContext.for_m(m)
    P = decimal_transfer_matrix(m, ctx)
    with localcontext(ctx.decimal()):
        scale = Decimal(N) / m if not isinstance(N, Decimal) else N / m
        out = Decimal(0)
        for i in range(m):
            yi = ys[i] if isinstance(ys[i], Decimal) else Decimal(ys[i])
            out += (yi - scale * sum(P[i], Decimal(0))) * omega[i]
        return out


@dataclass(frozen=True)
class NRange:
    lower: float
    upper: float | None
    informative: bool


def n_search_range(y) -> NRange:
    """Bounds on the node count ``N`` that could produce ``y``.

    ``upper`` is ``None`` when ``y_m = 0`` (degenerate) and is flagged as not
    informative when ``min_k P[m,k]`` is vanishingly small.
    """
    ys = [float(v) for v in (y.counts if isinstance(y, DegreeDistribution) else y)]
    m = len(ys)
    if ys[-1] < 0:
        raise ValueError("y_m must be non-negative")
    lower = float(sum(ys))
    if ys[-1] == 0:
        return NRange(lower, None, False)
    log_pmin = float(_log_row(m, m).min())
    pmin = math.exp(log_pmin)
    upper = math.exp(math.log(ys[-1]) - log_pmin)
    return NRange(lower, upper, pmin >= UNINFORMATIVE_PMIN)


def scan_n(y, omega: Sequence[Decimal], ctx: PrecisionContext, points: int = 100) -> float:
    """N on a log grid over :func:`n_search_range` with the smallest |hyperplane residual|."""
    rng = n_search_range(y)
    lo = max(rng.lower, 1e-12)
    hi = rng.upper if (rng.upper is not None and rng.informative and rng.upper > lo) else 1e3 * lo
    grid = np.geomspace(lo, hi, points)
    return float(min(grid, key=lambda n: abs(hyperplane_residual(y, float(n), omega, ctx))))


@dataclass(frozen=True)
class FeasibilityReport:
    m: int
    N: float
    direct_feasible: bool
    bounds: ClassBounds
    n_range: NRange
    hyperplane_residual: Decimal
    omega: tuple
    omega_residual: Decimal
    negative_classes: tuple
    digits: int
    notes: tuple = field(default=())

    @property
    def bounds_ok(self) -> tuple:
        return self.bounds.ok

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "digits": self.digits,
            "direct_feasible": self.direct_feasible,
            "negative_classes": list(self.negative_classes),
            "bounds_ok": list(self.bounds.ok),
            "bounds_lower": list(self.bounds.lower),
            "bounds_upper": list(self.bounds.upper),
            "n_range": {"lower": self.n_range.lower, "upper": self.n_range.upper,
                        "informative": self.n_range.informative},
            "hyperplane_residual": str(self.hyperplane_residual),
            "omega": [str(v) for v in self.omega],
            "omega_residual": str(self.omega_residual),
            "notes": list(self.notes),
        }


def diagnose(y, ctx: PrecisionContext | None = None, N: float | None = None,
             use_shift: bool = True) -> FeasibilityReport:
    """Full report for target ``y``.

    ``N`` defaults to ``||P^-1 y||_1``; with ``use_shift=False`` it is found by
    :func:`scan_n` instead.
    """
    ys = list(y.counts) if isinstance(y, DegreeDistribution) else list(y)
    m = len(ys)
    ctx = ctx or PrecisionContext.for_m(m)
    shift = shift_input(ys, ctx)
    omega = compute_omega(m, ctx)
    notes = []
    if N is None:
        if use_shift:
            # kept in Decimal: the hyperplane residual cancels to ~digits
            with localcontext(Context(prec=ctx.digits)):
                N = +sum(shift.x_real, Decimal(0))
        else:
            N = scan_n(ys, omega, ctx)
    if N <= 0:
        notes.append("N from the shifted input is not positive; bounds evaluated at ||y||_1")
        N = float(sum(float(v) for v in ys)) or 1.0
    bounds = class_bounds(ys, float(N))
    differs = [i + 1 for i, (a, b) in enumerate(zip(bounds.upper, bounds.diagonal_upper)) if a != b]
    if differs:
        notes.append(f"row maximum is off the diagonal for classes {differs}")
    return FeasibilityReport(
        m=m,
        N=float(N),
        direct_feasible=shift.feasible,
        bounds=bounds,
        n_range=n_search_range(ys),
        hyperplane_residual=hyperplane_residual(ys, N, omega, ctx),
        omega=tuple(omega),
        omega_residual=omega_residual(omega, ctx),
        negative_classes=tuple(i + 1 for i in shift.negative),
        digits=ctx.digits,
        notes=tuple(notes),
    )


@dataclass(frozen=True, eq=False)
class ProjectionSample:
    inputs: np.ndarray  # (count, m) integer vectors
    outputs: np.ndarray  # (count, m) images under P

    def histogram_rows(self, bins: int = 50) -> list[tuple]:
        """``(pair, xi, xj, weight)`` rows: 2-D histograms of every coordinate pair.

        ``xi``/``xj`` are bin centres, ``weight`` the number of samples in the bin.
        """
        m = self.outputs.shape[1]
        rows = []
        for i in range(m):
            for j in range(i + 1, m):
                h, ei, ej = np.histogram2d(self.outputs[:, i], self.outputs[:, j], bins=bins)
                ci = (ei[:-1] + ei[1:]) / 2
                cj = (ej[:-1] + ej[1:]) / 2
                for a, b in zip(*np.nonzero(h)):
                    rows.append((f"X{i + 1}-X{j + 1}", float(ci[a]), float(cj[b]), int(h[a, b])))
        return rows

    def to_csv(self, path=None, bins: int = 50) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "xi", "xj", "weight"])
        for pair, xi, xj, weight in self.histogram_rows(bins):
            w.writerow([pair, repr(xi), repr(xj), weight])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def sample_positive_image(m: int, count: int, box_max: int = 100, seed: int = 0,
                          chunk: int = 20_000) -> ProjectionSample:
    """Images under ``P`` of uniform integer vectors in ``{0..box_max}^m``.

    Chunk ``c`` uses stream ``(seed, c)``.
    """
    if m < 2:
        raise ValueError("projections need m >= 2")
    P = build_transfer_matrix(m).P
    parts = []
    for c, start in enumerate(range(0, count, chunk)):
        n = min(chunk, count - start)
        parts.append(make_rng(seed, c).integers(0, box_max + 1, size=(n, m)))
    X = np.concatenate(parts) if parts else np.empty((0, m), dtype=np.int64)
    return ProjectionSample(X, X @ P.T)
