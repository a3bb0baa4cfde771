import itertools
import math
import random
from decimal import Context, Decimal, localcontext
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from chunglu import exact_inverse as ei
from chunglu.distributions import power_law_distribution
from chunglu.exact_inverse import (
    PrecisionContext,
    apply_inverse,
    binomial,
    euler_number,
    forward,
    rational_inverse,
    round_int,
    shift_input,
    stirling_first_unsigned,
    vandermonde_inverse,
)


def cycles(perm):
    seen, count = set(), 0
    for start in range(len(perm)):
        if start not in seen:
            count += 1
            j = start
            while j not in seen:
                seen.add(j)
                j = perm[j]
    return count


@pytest.mark.parametrize("n", range(0, 7))
def test_stirling_matches_cycle_enumeration(n):
    counts = [0] * (n + 1)
    for perm in itertools.permutations(range(n)):
        counts[cycles(perm)] += 1
    assert [stirling_first_unsigned(n, k) for k in range(n + 1)] == counts


@pytest.mark.parametrize("n, k, expected", [(5, 5, 1), (4, 2, 11), (3, 1, 2), (3, 5, 0), (0, 0, 1)])
def test_stirling_values(n, k, expected):
    assert stirling_first_unsigned(n, k) == expected


def test_stirling_row_sums_are_factorials():
    assert sum(stirling_first_unsigned(30, k) for k in range(31)) == math.factorial(30)


@pytest.mark.parametrize("n, k, expected", [(5, 0, 1), (6, 3, 20), (4, 5, 0), (3, -1, 0)])
def test_binomial_values(n, k, expected):
    assert binomial(n, k) == expected


def test_binomial_matches_pascal():
    row = [1]
    for n in range(1, 25):
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
        assert [binomial(n, k) for k in range(n + 1)] == row


@pytest.mark.parametrize("m, expected", [
    (1, [[1]]),
    (2, [[2, -1], [-1, 1]]),
    (3, [[3, Fraction(-5, 2), Fraction(1, 2)], [-3, 4, -1], [1, Fraction(-3, 2), Fraction(1, 2)]]),
])
def test_vandermonde_inverse_small(m, expected):
    assert vandermonde_inverse(m).as_lists() == [[Fraction(v) for v in row] for row in expected]


def sympy_inverse(m):
    V = sympy.Matrix(m, m, lambda i, k: sympy.Integer(k + 1) ** i)
    inv = V.inv(method="GE")
    return [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(m)] for i in range(m)]


@pytest.mark.parametrize("m", range(1, 13))
def test_vandermonde_inverse_matches_elimination(m):
    closed = vandermonde_inverse(m).as_lists()
    assert closed == sympy_inverse(m)
    assert closed == rational_inverse(ei.vandermonde_matrix(m))


@pytest.mark.parametrize("m", [5, 20])
def test_vandermonde_inverse_identity_and_signs(m):
    inv = vandermonde_inverse(m)
    V = ei.vandermonde_matrix(m)
    for i in range(m):
        for j in range(m):
            assert sum(V[i][k] * inv[k, j] for k in range(m)) == (1 if i == j else 0)
            assert (inv[i, j] > 0) == ((i + j) % 2 == 0)


def test_integer_form_matches_rationals():
    inv = vandermonde_inverse(9)
    for row, nrow in zip(inv.entries, inv.numer):
        assert [Fraction(n, inv.denom) for n in nrow] == list(row)


def test_convention_check_fails_loudly(monkeypatch):
    monkeypatch.setattr(ei, "_validated", False)
    monkeypatch.setattr(ei, "_closed_form", lambda m: [[Fraction(1)] * m for _ in range(m)])
    ei.vandermonde_inverse.cache_clear()
    try:
        with pytest.raises(RuntimeError, match="convention"):
            ei.vandermonde_inverse(3)
    finally:
        ei.vandermonde_inverse.cache_clear()


def test_euler_number_digits():
    known = "2.71828182845904523536028747135266249775724709369995957496696762772407663035354759457138217852516642742746"
    e = euler_number(100)
    assert str(e) == known[:101]


def test_precision_context_defaults():
    assert PrecisionContext.for_m(40).digits == max(100, math.ceil(40 * math.log10(40)) + 50)
    assert PrecisionContext.for_m(200).digits == math.ceil(200 * math.log10(200)) + 50
    with pytest.raises(ValueError):
        PrecisionContext(20)


def test_shift_m1_roundtrip():
    ctx = PrecisionContext(100)
    y = forward([100], ctx)
    r = shift_input(y, ctx)
    assert r.x_rounded == (100,)
    assert abs(r.x_real[0] - 100) < Decimal("1e-90")
    assert r.feasible


def test_shift_power_law_roundtrip():
    ctx = PrecisionContext(100)
    x = power_law_distribution(1000, 2, 40)
    r = shift_input(forward(x, ctx), ctx)
    assert r.x_rounded == x.counts
    assert r.feasible


def test_raw_power_law_is_infeasible():
    r = shift_input(power_law_distribution(1000, 2, 40), PrecisionContext(100))
    assert not r.feasible
    assert r.negative and all(r.x_real[i] < -r.tolerance for i in r.negative)
    # reported as computed, not clamped
    assert min(r.x_rounded) < 0
    with pytest.raises(ValueError, match="infeasible"):
        r.rounded_distribution()


def test_materialized_inverse_agrees_with_staged():
    ctx = PrecisionContext(120)
    y = forward(power_law_distribution(1000, 1, 20), ctx)
    a = shift_input(y, ctx)
    b = shift_input(y, ctx, materialize=True)
    assert a.x_rounded == b.x_rounded
    assert max(abs(u - v) for u, v in zip(a.x_real, b.x_real)) < Decimal("1e-40")


@pytest.mark.parametrize("x, expected", [
    ([1.4, 2.5, -0.2], [1, 3, 0]),
    ([Decimal("-2.5"), Fraction(7, 2), 0.5], [-3, 4, 1]),
    ([3, -4, 0], [3, -4, 0]),
])
def test_round_int(x, expected):
    assert round_int(x) == expected


@given(st.lists(st.floats(0, 100), min_size=1, max_size=40))
def test_round_int_error_bound(x):
    r = round_int(x)
    assert sum(abs(a - b) for a, b in zip(x, r)) <= len(x) / 2


positive_targets = st.integers(1, 40).flatmap(
    lambda m: st.lists(st.integers(1, 10**6), min_size=m, max_size=m))


@settings(max_examples=25)
@given(positive_targets)
def test_inverse_identity(y):
    ctx = PrecisionContext(100)
    x = apply_inverse(y, ctx)
    back = forward(x, ctx)
    with localcontext(Context(prec=120)):
        rel = sum(abs(b - a) for a, b in zip(y, back)) / sum(y)
    assert rel <= Decimal(10) ** -(ctx.digits // 4)


feasible_inputs = st.integers(1, 40).flatmap(
    lambda m: st.lists(st.floats(0, 5000), min_size=m, max_size=m))


@settings(max_examples=25)
@given(feasible_inputs)
def test_rounding_locality_and_contraction(x):
    ctx = PrecisionContext(100)
    y = forward(x, ctx)
    r = shift_input(y, ctx)
    m = len(x)
    assert r.feasible
    assert r.rounding_residual <= Decimal(m) / 2 + Decimal("1e-6")
    with localcontext(Context(prec=120)):
        delta = sum(abs(a - b) for a, b in zip(r.x_real, r.x_rounded))
    assert r.rounding_residual <= delta + Decimal("1e-60")


@pytest.mark.parametrize("m", range(1, 9))
def test_no_exact_integer_solution(m):
    rng = random.Random(m)
    ctx = PrecisionContext(200)
    for _ in range(5):
        y = [rng.randint(1, 1000) for _ in range(m)]
        x = apply_inverse(y, ctx)
        assert max(abs(v - round(v)) for v in x) > Decimal("1e-150")


def test_shift_result_json():
    r = shift_input(power_law_distribution(100, 1, 3), PrecisionContext(60))
    js = r.to_json()
    assert js["feasible"] is False and js["negative_classes"] == [i + 1 for i in r.negative]
    assert len(js["x_real"]) == 3
