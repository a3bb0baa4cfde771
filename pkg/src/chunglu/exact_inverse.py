"""Exact inverse of the Poisson transfer matrix and shifted Chung-Lu inputs.

``P = A V B`` with diagonal ``A``, ``B`` and Vandermonde ``V`` on nodes
``1..m``.  ``V^-1`` has the closed form

    Vinv[i, j] = (-1)**(i+j) * sum_{k=max(i,j)}^{m} C(k-1, i-1) * c(k, j) / (k-1)!

(1-based, ``c`` the unsigned Stirling numbers of the first kind), built here as
exact rationals.  The sign and index convention is checked against
Gauss-Jordan elimination over the rationals the first time it is used.

``P^-1 y`` is applied in stages, never as one matrix: ``A^-1`` and ``V^-1`` act
exactly on the rational value of ``y``, and only ``B^-1 = diag(e**k / k)`` is
evaluated in ``Decimal`` at the working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Context, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .distributions import DegreeDistribution

#: Extra decimal digits carried internally beyond ``PrecisionContext.digits``.
GUARD_DIGITS = 10
#: The closed form is compared with elimination up to this size on first use.
VALIDATE_UP_TO = 8


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal digits used for every extended-precision step."""

    digits: int = 100

    def __post_init__(self):
        if self.digits < 50:
            raise ValueError("PrecisionContext needs at least 50 digits")

    @classmethod
    def for_m(cls, m: int) -> "PrecisionContext":
        return cls(default_digits(m))

    @property
    def tolerance(self) -> Decimal:
        """Negativity threshold for feasibility, ``10**-(digits // 2)``."""
        return Decimal(1).scaleb(-(self.digits // 2))

    def decimal(self, guard: int = GUARD_DIGITS) -> Context:
        return Context(prec=self.digits + guard)


def default_digits(m: int) -> int:
    if m <= 1:
        return 100
    return max(100, math.ceil(m * math.log10(m)) + 50)


# -- combinatorics -----------------------------------------------------------

@lru_cache(maxsize=None)
def _stirling_rows(n: int) -> tuple:
    rows = [(1,)]
    for r in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (r + 1)
        for k in range(1, r + 1):
            left = prev[k - 1]
            right = prev[k] if k < r else 0
            row[k] = left + (r - 1) * right
        rows.append(tuple(row))
    return tuple(rows)


def stirling_first_unsigned(n: int, k: int) -> int:
    """Permutations of ``n`` elements with exactly ``k`` cycles."""
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if k > n:
        return 0
    return _stirling_rows(n)[n][k]


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


# -- Vandermonde inverse -----------------------------------------------------

def vandermonde_matrix(m: int) -> list[list[int]]:
    """``V[i][k] = (k+1)**i`` (0-based storage of rows i=1..m, nodes k=1..m)."""
    return [[k ** i for k in range(1, m + 1)] for i in range(m)]


def rational_inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals; raises on a singular matrix."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class ExactVandermondeInverse:
    """``V^-1`` as exact rationals, plus an integer form ``numer / denom``."""

    m: int
    entries: tuple
    numer: tuple = field(repr=False)
    denom: int = field(repr=False)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def as_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


def _closed_form(m: int) -> list[list[Fraction]]:
    stir = _stirling_rows(m)
    fact = [math.factorial(k) for k in range(m + 1)]
    out = []
    for i in range(1, m + 1):
        row = []
        for j in range(1, m + 1):
            total = Fraction(0)
            for k in range(max(i, j), m + 1):
                total += Fraction(binomial(k - 1, i - 1) * stir[k][j], fact[k - 1])
            row.append(total if (i + j) % 2 == 0 else -total)
        out.append(row)
    return out


_validated = False


def _validate_convention() -> None:
    global _validated
    if _validated:
        return
    for m in range(1, VALIDATE_UP_TO + 1):
        if _closed_form(m) != rational_inverse(vandermonde_matrix(m)):
            raise RuntimeError(
                f"closed-form Vandermonde inverse disagrees with elimination at m={m}; "
                "the Stirling/sign convention is wrong"
            )
    _validated = True


@lru_cache(maxsize=32)
def vandermonde_inverse(m: int) -> ExactVandermondeInverse:
    if m < 1:
        raise ValueError("m must be at least 1")
    _validate_convention()
    entries = _closed_form(m)
    denom = math.factorial(m - 1)
    numer = tuple(tuple(int(v * denom) for v in row) for row in entries)
    return ExactVandermondeInverse(m, tuple(tuple(r) for r in entries), numer, denom)


# -- extended precision constants ---------------------------------------------

@lru_cache(maxsize=32)
def euler_number(digits: int) -> Decimal:
    """``e`` to ``digits`` significant digits from the series of ``exp(1)``.

    Terms stop once ``1/n!`` drops below ``10**-(digits+5)``; the tail after
    that term is bounded by ``2/(n+1)!``, well inside the guard.
    """
    with localcontext(Context(prec=digits + 5)):
        eps = Decimal(1).scaleb(-(digits + 5))
        total = Decimal(0)
        term = Decimal(1)
        n = 0
        while term > eps:
            total += term
            n += 1
            term /= n
        with localcontext(Context(prec=digits)):
            return +total


@lru_cache(maxsize=4096)
def _exp_power(k: int, digits: int) -> Decimal:
    """``e**k`` by integer powering of ``e`` carried at ``digits + 5``."""
    e = euler_number(digits + 5)
    with localcontext(Context(prec=digits + 5)):
        v = e ** k
    with localcontext(Context(prec=digits)):
        return +v


def _exp_table(m: int, digits: int) -> tuple:
    return tuple(_exp_power(k, digits) for k in range(1, m + 1))


def exp_int(k: int, ctx: PrecisionContext) -> Decimal:
    if k == 0:
        return Decimal(1)
    if k < 0:
        with localcontext(ctx.decimal()):
            return 1 / exp_int(-k, ctx)
    return _exp_power(k, ctx.digits + GUARD_DIGITS)


@lru_cache(maxsize=16)
def _decimal_matrix(m: int, digits: int) -> tuple:
    ctx = Context(prec=digits)
    exps = _exp_table(m, digits)
    rows = []
    with localcontext(ctx):
        inv_e = [1 / v for v in exps]
        for i in range(1, m + 1):
            fi = math.factorial(i)
            rows.append(tuple(Decimal(k ** i) * inv_e[k - 1] / fi for k in range(1, m + 1)))
    return tuple(rows)


def decimal_transfer_matrix(m: int, ctx: PrecisionContext) -> tuple:
    """``P`` with ``Decimal`` entries at ``ctx.digits`` plus guard digits."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return _decimal_matrix(m, ctx.digits + GUARD_DIGITS)


def decimal_norm1(m: int, ctx: PrecisionContext | None = None) -> Decimal:
    """Largest column sum of ``P`` in extended precision.

    Columns sum to ``1 - e**-k - tail`` which rounds to exactly 1.0 in
    doubles once ``k`` exceeds ~37, so strict ``< 1`` needs this form.
    """
    ctx = ctx or PrecisionContext.for_m(m)
    P = decimal_transfer_matrix(m, ctx)
    with localcontext(ctx.decimal()):
        return max(sum((P[i][k] for i in range(m)), Decimal(0)) for k in range(m))


def _values(y) -> list:
    return list(y.counts) if isinstance(y, DegreeDistribution) else list(y)


def forward(x, ctx: PrecisionContext) -> list[Decimal]:
    """``P x`` in extended precision."""
    xs = _values(x)
    m = len(xs)
    P = decimal_transfer_matrix(m, ctx)
    with localcontext(ctx.decimal()):
        xd = [v if isinstance(v, Decimal) else _to_decimal(v) for v in xs]
        return [sum((p * v for p, v in zip(row, xd)), Decimal(0)) for row in P]


def _to_decimal(v) -> Decimal:
    if isinstance(v, Fraction):
        return Decimal(v.numerator) / Decimal(v.denominator)
    if isinstance(v, float):
        return Decimal(v)
    return Decimal(v)


# -- staged inverse ------------------------------------------------------------

def _common_denominator(values: Sequence[Fraction]) -> tuple[list[int], int]:
    q = 1
    for v in values:
        q = q * v.denominator // math.gcd(q, v.denominator)
    return [int(v * q) for v in values], q


def _inverse_core(y: Sequence) -> tuple[list[int], int]:
    """``V^-1 A^-1 y`` exactly, as integer numerators over one denominator."""
    m = len(y)
    vinv = vandermonde_inverse(m)
    a = [Fraction(v) * math.factorial(i) for i, v in enumerate(y, start=1)]
    nums, q = _common_denominator(a)
    z = [sum(n * v for n, v in zip(row, nums)) for row in vinv.numer]
    return z, q * vinv.denom


def apply_inverse(y, ctx: PrecisionContext) -> list[Decimal]:
    """``P^-1 y = B^-1 (V^-1 (A^-1 y))`` evaluated right to left."""
    ys = _values(y)
    m = len(ys)
    if m < 1:
        raise ValueError("empty target")
    z, den = _inverse_core(ys)
    exps = [exp_int(k, ctx) for k in range(1, m + 1)]
    with localcontext(ctx.decimal()):
        dden = Decimal(den)
        out = [Decimal(zk) / dden * exps[k - 1] / k for k, zk in enumerate(z, start=1)]
    with localcontext(Context(prec=ctx.digits)):
        return [+v for v in out]


def apply_inverse_transpose(v, ctx: PrecisionContext) -> list[Decimal]:
    """``(P^-1)^T v = A^-1 (V^-1)^T (B^-1 v)``, same staging as :func:`apply_inverse`."""
    vs = [Fraction(x) for x in _values(v)]
    m = len(vs)
    vinv = vandermonde_inverse(m)
    exps = [exp_int(k, ctx) for k in range(1, m + 1)]
    b = [vs[k - 1] * Fraction(exps[k - 1]) / k for k in range(1, m + 1)]
    nums, q = _common_denominator(b)
    den = q * vinv.denom
    cols = list(zip(*vinv.numer))
    z = [sum(n * c for n, c in zip(col, nums)) for col in cols]
    with localcontext(ctx.decimal()):
        dden = Decimal(den)
        out = [Decimal(zi) * math.factorial(i) / dden for i, zi in enumerate(z, start=1)]
    with localcontext(Context(prec=ctx.digits)):
        return [+x for x in out]


def materialize_inverse(m: int, ctx: PrecisionContext) -> list[list[Decimal]]:
    """``P^-1`` as a single ``Decimal`` matrix; debugging and comparison only."""
    vinv = vandermonde_inverse(m)
    exps = [exp_int(k, ctx) for k in range(1, m + 1)]
    with localcontext(Context(prec=ctx.digits)):
        return [[_to_decimal(vinv.entries[k - 1][j - 1] * math.factorial(j)) * exps[k - 1] / k
                 for j in range(1, m + 1)] for k in range(1, m + 1)]


def _round_half_away(v) -> int:
    if isinstance(v, Decimal):
        return int(v.to_integral_value(rounding=ROUND_HALF_UP))
    f = Fraction(v)
    q = math.floor(abs(f) + Fraction(1, 2))
    return q if f >= 0 else -q


def round_int(x) -> list[int]:
    """Nearest integer per entry, halves away from zero."""
    return [_round_half_away(v) for v in _values(x)]


@dataclass(frozen=True)
class ShiftResult:
    """Shifted input ``x = P^-1 y`` for a target ``y``.

    ``rounding_residual`` is ``||y - P round(x)||_1``; ``negative`` lists the
    0-based classes whose real solution is below ``-tolerance``.
    """

    x_real: tuple
    x_rounded: tuple
    feasible: bool
    predicted_back: tuple
    rounding_residual: Decimal
    negative: tuple
    tolerance: Decimal
    digits: int

    @property
    def m(self) -> int:
        return len(self.x_real)

    def rounded_distribution(self) -> DegreeDistribution:
        """The rounded input as a distribution; only valid when feasible."""
        if not self.feasible:
            raise ValueError(f"target is infeasible: negative classes {[i + 1 for i in self.negative]}")
        return DegreeDistribution(tuple(max(v, 0) for v in self.x_rounded))

    def to_json(self) -> dict:
        return {
            "digits": self.digits,
            "feasible": self.feasible,
            "tolerance": str(self.tolerance),
            "negative_classes": [i + 1 for i in self.negative],
            "x_real": [str(v) for v in self.x_real],
            "x_rounded": list(self.x_rounded),
            "predicted_back": [str(v) for v in self.predicted_back],
            "rounding_residual": str(self.rounding_residual),
        }


def shift_input(y, ctx: PrecisionContext | None = None, materialize: bool = False) -> ShiftResult:
    """Solve ``P x = y`` for the Chung-Lu input that yields target ``y``.

    Negative solutions are reported, never clamped.  ``materialize=True``
    multiplies by a stored ``P^-1`` instead of the staged factors.
    """
    ys = _values(y)
    m = len(ys)
    if m < 1:
        raise ValueError("target must have at least one degree class")
    ctx = ctx or PrecisionContext.for_m(m)
    if materialize:
        Pinv = materialize_inverse(m, ctx)
        with localcontext(Context(prec=ctx.digits)):
            yd = [_to_decimal(Fraction(v)) for v in ys]
            x_real = [sum((p * v for p, v in zip(row, yd)), Decimal(0)) for row in Pinv]
    else:
        x_real = apply_inverse(ys, ctx)
    x_rounded = round_int(x_real)
    tol = ctx.tolerance
    negative = tuple(i for i, v in enumerate(x_real) if v < -tol)
    back = forward(x_rounded, ctx)
    with localcontext(ctx.decimal()):
        residual = sum((abs(_to_decimal(Fraction(a)) - b) for a, b in zip(ys, back)), Decimal(0))
    with localcontext(Context(prec=ctx.digits)):
        back = [+v for v in back]
        residual = +residual
    return ShiftResult(
        x_real=tuple(x_real),
        x_rounded=tuple(x_rounded),
        feasible=not negative,
        predicted_back=tuple(back),
        rounding_residual=residual,
        negative=negative,
        tolerance=tol,
        digits=ctx.digits,
    )
