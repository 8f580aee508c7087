import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riccati_holonomy.errors import PoleOrderTooHigh
from riccati_holonomy.rational import RationalMap1D
from riccati_holonomy.riccati_family import (
    CuspData,
    QuadDifferential,
    blowup_consistency,
    diagonal_self_intersection,
    explicit_quadratic,
    explicit_riccati,
    explicit_schwarzian_value,
    hirzebruch_note,
    local_model_solution,
    parabolic_type_check,
    schwarzian_of_riccati,
    schwarzian_residuals,
    tangency_count,
)
from riccati_holonomy.transport import BasePath, transport

coord = st.floats(-2, 2, allow_nan=False)
lambdas = st.builds(complex, coord, coord)


def _fd_schwarzian(sys, t0, h=1e-2):
    # Schwarzian of phi = -b/a from phi' = -alpha0/a^2 by fourth-order differences
    d = []
    for k in (-2, -1, 0, 1, 2):
        t = t0 + k * h
        H = transport(sys, BasePath((0, t0, t))).H
        d.append(-sys.alpha0(t) / H.a ** 2)
    p1 = d[2]
    p2 = (-d[4] + 8 * d[3] - 8 * d[1] + d[0]) / (12 * h)
    p3 = (-d[4] + 16 * d[3] - 30 * d[2] + 16 * d[1] - d[0]) / (12 * h * h)
    return p3 / p1 - 1.5 * (p2 / p1) ** 2


@pytest.mark.parametrize("lam", [0, 1, 0.3 + 0.1j, -2j])
def test_schwarzian_of_developing_map_by_differences(lam):
    sys = explicit_riccati(lam)
    for t0 in (0.4 + 0.3j, -0.2 + 0.5j):
        fd = _fd_schwarzian(sys, t0)
        assert abs(fd - explicit_schwarzian_value(lam, t0)) < 1e-5 * max(1, abs(fd))


@given(lambdas)
def test_schwarzian_closed_form(lam):
    _, rel = schwarzian_residuals(lam, samples=20, seed=1)
    assert rel.max() <= 1e-9


def test_schwarzian_is_rational_in_t():
    S = schwarzian_of_riccati(explicit_riccati(0.3 + 0.1j))
    for p in (1, 1j, -1, -1j):
        assert S.pole_order(p) == 2


@given(lambdas, st.builds(complex, coord, coord))
def test_lambda_sign_symmetry(lam, t):
    if abs(t ** 4 - 1) < 0.1:
        return
    lhs = explicit_schwarzian_value(lam, 1j * t) * (1j) ** 2
    assert abs(lhs - explicit_schwarzian_value(-lam, t)) <= 1e-10 * max(1, abs(lhs))


@given(lambdas)
def test_explicit_family_is_parabolic(lam):
    ok, reports = parabolic_type_check(explicit_quadratic(lam))
    assert ok
    assert [r.order for r in reports] == [2, 2, 2, 2]
    assert all(abs(r.coefficient - 0.5) < 1e-8 for r in reports)


def test_parabolic_check_detects_wrong_coefficient_and_high_order():
    t = RationalMap1D.variable()
    qd = QuadDifferential(0.3 / t ** 2, (0j,))
    ok, reports = parabolic_type_check(qd)
    assert not ok and reports[0].coefficient == pytest.approx(0.3)
    with pytest.raises(PoleOrderTooHigh):
        parabolic_type_check(QuadDifferential(1 / t ** 3, (0j,)))


def test_undeclared_pole_rejected():
    t = RationalMap1D.variable()
    with pytest.raises(ValueError):
        QuadDifferential(1 / (t - 2), (0j,))


@pytest.mark.parametrize("lam", [0, 0.7 - 0.2j])
def test_blowup_reproduces_riccati_only_for_consistent_reading(lam):
    assert blowup_consistency(lam) < 1e-12
    assert blowup_consistency(lam, reading="printed") > 1e-3


@given(st.integers(0, 5), st.floats(-1, 1), st.floats(-1, 1))
def test_local_model_solves_its_equation(n, c, x):
    h = 1e-6
    dt = (local_model_solution(n, c, x + h) - local_model_solution(n, c, x - h)) / (2 * h)
    rhs = -np.exp(n * x) + n * local_model_solution(n, c, x)
    assert abs(dt - rhs) < 1e-5 * max(1, abs(rhs))


def test_compactification_examples():
    a = CuspData.from_counts((0, 0, 0, 0))
    assert (tangency_count(a), diagonal_self_intersection(a)) == (0, -2)
    b = CuspData.from_counts((0, 1, 1))
    assert (tangency_count(b), diagonal_self_intersection(b)) == (2, 1)
    assert "F_2" in hirzebruch_note(-2)
    assert "P^2" in hirzebruch_note(1)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=8))
def test_self_intersection_identity(n):
    cd = CuspData.from_counts(n)
    assert diagonal_self_intersection(cd) == 2 - len(n) + tangency_count(cd)


def test_cusp_data_validation():
    with pytest.raises(ValueError):
        CuspData((0j, 1 + 0j), (1,))
    with pytest.raises(ValueError):
        CuspData((0j,), (-1,))
    pts = CuspData.from_counts((0, 0, 0)).punctures
    assert all(abs(abs(p) - 1) < 1e-15 for p in pts)
    assert abs(pts[1] - cmath.exp(2j * cmath.pi / 3)) < 1e-15
