import math
from decimal import Decimal, localcontext

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chunglu.distributions import power_law_distribution
from chunglu.exact_inverse import PrecisionContext, decimal_transfer_matrix, forward, shift_input
from chunglu.feasibility import (
    class_bounds,
    compute_omega,
    diagnose,
    hyperplane_residual,
    n_search_range,
    omega_residual,
    sample_positive_image,
    scan_n,
)
from chunglu.transfer import build_transfer_matrix, mean_action

CTX = PrecisionContext(100)


def test_bounds_single_class_degenerate():
    N = 50.0
    assert class_bounds([N * math.exp(-1)], N).all_ok
    assert not class_bounds([N * math.exp(-1) * 1.001], N).all_ok
    assert not class_bounds([N * math.exp(-1) * 0.999], N).all_ok


@pytest.mark.parametrize("m", [2, 5, 20, 40])
def test_bounds_interior_point(m):
    N = 1000.0
    y = build_transfer_matrix(m).P @ np.full(m, N / m)
    assert class_bounds(y, N).all_ok


def test_bounds_raw_power_law_degree_one_too_large():
    y = power_law_distribution(1000, 2, 40)
    b = class_bounds(y, float(y.total_nodes))
    assert not b.ok[0]
    assert b.margin[0] < 0


def test_bounds_use_true_row_maximum():
    # for rows i >= 2 the pmf over k peaks at k = i but not always strictly
    b = class_bounds([1.0] * 10, 10.0)
    T = build_transfer_matrix(10).P
    np.testing.assert_allclose(b.upper, 10 * T.max(axis=1), rtol=1e-12)
    np.testing.assert_allclose(b.lower, 10 * T.min(axis=1), rtol=1e-12)


def test_omega_m1_is_e():
    om = compute_omega(1, CTX)
    assert abs(om[0] - Decimal("2.718281828459045235360287471352662497757247093699959574966967627724")) < Decimal("1e-60")


def test_omega_m2_residual():
    om = compute_omega(2, CTX)
    assert omega_residual(om, CTX) <= Decimal("1e-30")


@pytest.mark.parametrize("m", [3, 10, 25, 40])
def test_omega_residual(m):
    assert omega_residual(compute_omega(m, CTX), CTX) <= Decimal("1e-25")


def test_omega_recomputed_agrees():
    a = compute_omega(30, CTX)
    b = compute_omega(30, PrecisionContext(140))
    assert max(abs(u - v) / abs(v) for u, v in zip(a, b)) < Decimal("1e-80")


def test_hyperplane_mean_point_is_zero():
    m, N = 12, Decimal(600)
    y = forward([N / m] * m, CTX)
    assert abs(hyperplane_residual(y, N, compute_omega(m, CTX), CTX)) < Decimal("1e-60")


def test_hyperplane_on_plane_and_off_plane():
    m = 10
    x = [3, 0, 7, 1, 2, 9, 0, 4, 4, 1]
    N = sum(x)
    om = compute_omega(m, CTX)
    y = forward(x, CTX)
    assert abs(hyperplane_residual(y, N, om, CTX)) <= Decimal(10) ** -(CTX.digits // 4)
    with localcontext(CTX.decimal()):
        y_off = [y[0] + 1] + list(y[1:])
    r = hyperplane_residual(y_off, N, om, CTX)
    assert abs(r - om[0]) < Decimal("1e-50")


def test_n_range_single_class():
    r = n_search_range([36.788])
    assert r.lower == pytest.approx(36.788)
    assert r.upper == pytest.approx(36.788 * math.e)
    assert r.upper == pytest.approx(100.0, abs=1e-3)
    assert r.informative


def test_n_range_zero_last_class():
    r = n_search_range([5.0, 0.0])
    assert r.lower == 5.0 and r.upper is None and not r.informative


def test_n_range_large_m_not_informative():
    r = n_search_range(power_law_distribution(1000, 2, 40))
    assert not r.informative
    assert r.upper > 1e40


def test_scan_n_finds_node_count():
    x = [40, 30, 20]
    y = forward(x, CTX)
    N = scan_n(y, compute_omega(3, CTX), CTX, points=400)
    assert N == pytest.approx(90, rel=0.02)


def test_projection_sample():
    s = sample_positive_image(4, 100_000, 100, seed=1)
    assert s.outputs.shape == (100_000, 4)
    assert np.all(s.outputs >= 0)
    N = s.inputs.sum(axis=1)
    nz = N > 0
    assert np.max(s.outputs[nz, 0] / N[nz]) <= math.exp(-1) + 1e-12


def test_projection_satisfies_bounds():
    s = sample_positive_image(4, 2000, 100, seed=2)
    for x, y in zip(s.inputs, s.outputs):
        if x.sum():
            assert class_bounds(y, float(x.sum())).all_ok


def test_projection_csv_is_deterministic():
    a = sample_positive_image(3, 5000, 100, seed=7).to_csv(bins=10)
    b = sample_positive_image(3, 5000, 100, seed=7).to_csv(bins=10)
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "pair,xi,xj,weight"
    assert sum(int(l.split(",")[-1]) for l in lines[1:] if l.startswith("X1-X2")) == 5000


def test_projection_needs_two_dims():
    with pytest.raises(ValueError):
        sample_positive_image(1, 10)


feasible_inputs = st.integers(2, 40).flatmap(
    lambda m: st.lists(st.integers(0, 2000), min_size=m, max_size=m).filter(lambda x: sum(x) > 0))


@settings(max_examples=30)
@given(feasible_inputs)
def test_diagnostics_never_reject_feasible(x):
    y = forward(x, CTX)
    rep = diagnose(y, CTX)
    assert rep.direct_feasible
    assert rep.bounds.all_ok
    assert abs(rep.hyperplane_residual) <= CTX.tolerance
    assert rep.N == pytest.approx(sum(x), rel=1e-12)


@settings(max_examples=20)
@given(st.integers(1, 20), st.floats(0.01, 1e4))
def test_mean_action_membership(m, r):
    N = r * m / 2
    y_float = mean_action(build_transfer_matrix(m), r)
    assert class_bounds(y_float, N).all_ok
    with localcontext(CTX.decimal()):
        half, N_exact = Decimal(r) / 2, Decimal(r) * m / 2
    y = forward([half] * m, CTX)
    rep = diagnose(y, CTX, N=N_exact)
    assert rep.direct_feasible and rep.bounds.all_ok
    assert abs(rep.hyperplane_residual) <= CTX.tolerance


def test_report_json_roundtrip():
    rep = diagnose(power_law_distribution(1000, 2, 8), CTX)
    js = rep.to_json()
    assert js["direct_feasible"] is False
    assert js["m"] == 8 and len(js["omega"]) == 8
    assert js["negative_classes"]
