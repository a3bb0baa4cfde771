"""Truncated Poisson transfer matrix at machine precision.

``P[i-1, k-1] = k**i * exp(-k) / i!`` for output degree ``i`` (row) and input
class ``k`` (column), so ``P @ x`` is the expected Chung-Lu output
distribution for input distribution ``x``.  ``P = A V B`` with
``A = diag(1/i!)``, ``V[i-1, k-1] = k**(i-1)`` and ``B = diag(k exp(-k))``.

Inversion needs extended precision and lives in :mod:`chunglu.exact_inverse`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DegreeDistribution

#: Largest m for which every entry of P is a positive IEEE double.
MAX_FLOAT_M = 170


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    m: int
    P: np.ndarray
    a_diag: np.ndarray
    b_diag: np.ndarray

    def vandermonde(self) -> np.ndarray:
        """Exact integer Vandermonde factor as an object array."""
        ks = range(1, self.m + 1)
        return np.array([[k ** i for k in ks] for i in range(self.m)], dtype=object)

    def reconstruct(self) -> np.ndarray:
        """``A V B`` evaluated in floating point."""
        v = self.vandermonde().astype(np.float64)
        return self.a_diag[:, None] * v * self.b_diag[None, :]

    def column_sums(self) -> np.ndarray:
        return self.P.sum(axis=0)

    def norm1(self) -> float:
        """Induced 1-norm, the largest column sum.

        In doubles this can round to exactly 1.0 for m >= ~37; use
        :func:`chunglu.exact_inverse.decimal_norm1` for a strict comparison.
        """
        return float(self.column_sums().max())


def build_transfer_matrix(m: int) -> TransferMatrix:
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > MAX_FLOAT_M:
        raise ValueError(
            f"m={m} exceeds {MAX_FLOAT_M}: entries k**i/i! leave the double range; "
            "build the matrix with chunglu.exact_inverse.decimal_transfer_matrix "
            "under a PrecisionContext instead"
        )
    i = np.arange(1, m + 1, dtype=np.float64)[:, None]
    k = np.arange(1, m + 1, dtype=np.float64)[None, :]
    lgam = np.array([math.lgamma(v + 1) for v in range(1, m + 1)])[:, None]
    # log space keeps k**i and i! from overflowing before they cancel
    P = np.exp(i * np.log(k) - k - lgam)
    a_diag = np.array([1.0 / math.factorial(v) for v in range(1, m + 1)])
    b_diag = np.array([v * math.exp(-v) for v in range(1, m + 1)])
    for arr in (P, a_diag, b_diag):
        arr.setflags(write=False)
    return TransferMatrix(m, P, a_diag, b_diag)


def _vector(x, m: int) -> np.ndarray:
    arr = x.as_array() if isinstance(x, DegreeDistribution) else np.asarray(
        [float(v) for v in x], dtype=np.float64)
    if arr.shape != (m,):
        raise ValueError(f"dimension mismatch: matrix is {m}x{m}, vector has {arr.shape[0]}")
    return arr


def predict_output(P: TransferMatrix, x) -> np.ndarray:
    """Expected output degree counts ``P x`` over classes 1..m."""
    return P.P @ _vector(x, P.m)


def mean_action(P: TransferMatrix, r: float) -> np.ndarray:
    """Average of ``P x`` over ``x`` uniform in the cube ``[0, r]^m``."""
    if r <= 0:
        raise ValueError("r must be positive")
    return (r / 2.0) * P.P.sum(axis=1)
