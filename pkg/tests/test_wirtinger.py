"""Unit tests for the Wirtinger jet substrate and its FD cross-check."""

import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folia.errors import DivisionNearPole, LogBranchNearZero, StencilOutsideDomain
from folia.wirtinger import (
    D_X,
    D_XBAR,
    D_Y,
    D_YBAR,
    FoliaError,
    WirtingerJet,
    constant_jet,
    derivative_jet,
    fd_wirtinger,
    holomorphy_residual,
    indices_up_to,
    jet_combine,
    jet_conj,
    jet_seed,
    total_order,
)


def test_seed_x():
    j = jet_seed((2 + 0j, 0j), "x")
    assert j.value == 2
    assert j.deriv(D_X) == 1
    assert j.deriv(D_XBAR) == 0
    assert j.deriv(D_Y) == 0
    assert all(total_order(k) == 1 for k in j.derivs)


def test_seed_y():
    j = jet_seed((0j, 1 + 0j), "y")
    assert j.value == 1
    assert j.deriv(D_Y) == 1
    assert j.deriv(D_X) == 0


def test_conj_of_seed():
    j = jet_conj(jet_seed((1j, 0j), "x"))
    assert j.value == -1j
    assert j.deriv(D_XBAR) == 1
    assert j.deriv(D_X) == 0


def test_mul_abs_square():
    x = jet_seed((1 + 1j, 0j), "x")
    j = jet_combine("mul", x, jet_conj(x))
    assert j.value == 2
    assert j.deriv(D_X) == 1 - 1j
    assert j.deriv(D_XBAR) == 1 + 1j
    assert j.deriv((1, 1, 0, 0)) == 1
    assert j.deriv((2, 0, 0, 0)) == 0


def test_div_reciprocal():
    x = jet_seed((2 + 0j, 0j), "x")
    j = jet_combine("div", constant_jet(1.0), x)
    assert j.value == 0.5
    assert j.deriv(D_X) == -0.25
    assert j.deriv((2, 0, 0, 0)) == 0.25


def test_exp_of_y():
    y = jet_seed((0j, 0j), "y")
    j = jet_combine("exp", y)
    assert j.value == 1
    assert j.deriv(D_Y) == 1
    assert j.deriv((0, 0, 2, 0)) == 1
    assert j.deriv(D_YBAR) == 0


def test_log_matches_reciprocal_derivatives():
    x = jet_seed((1.5 + 0.5j, 0j), "x")
    j = jet_combine("log", x)
    v = 1.5 + 0.5j
    assert j.value == pytest.approx(cmath.log(v))
    assert j.deriv(D_X) == pytest.approx(1 / v)
    assert j.deriv((2, 0, 0, 0)) == pytest.approx(-1 / v**2)
    assert j.deriv((3, 0, 0, 0)) == pytest.approx(2 / v**3)


def test_pow_int_and_negative_exponent():
    x = jet_seed((2 + 0j, 0j), "x")
    sq = jet_combine("pow-int", x, 2)
    assert sq.value == 4
    assert sq.deriv(D_X) == 4
    assert sq.deriv((2, 0, 0, 0)) == 2
    inv2 = jet_combine("pow-int", x, -2)
    assert inv2.value == 0.25
    assert inv2.deriv(D_X) == pytest.approx(-2 / 2**3)


def test_division_near_pole_raises():
    tiny = jet_seed((1e-15 + 0j, 0j), "x")
    with pytest.raises(DivisionNearPole) as err:
        jet_combine("div", constant_jet(1.0), tiny)
    assert err.value.denominator == 1e-15


def test_log_branch_near_zero_raises():
    tiny = jet_seed((1e-14 + 0j, 0j), "x")
    with pytest.raises(LogBranchNearZero):
        jet_combine("log", tiny)


def test_holomorphy_residual_y_squared():
    y = jet_seed((0j, 0.7 + 0.2j), "y")
    assert holomorphy_residual(y * y, "y") == 0.0


def test_holomorphy_residual_conj_y():
    y = jet_seed((0j, 0.7 + 0.2j), "y")
    assert holomorphy_residual(jet_conj(y), "y") == 1.0


def test_derivative_jet_reindexes_raw_entries():
    # d/dy of y^3 at y=2 is 12, second derivative 12, third 6
    y = jet_seed((0j, 2 + 0j), "y")
    cube = y**3
    d = derivative_jet(cube, D_Y)
    assert d.order == cube.order - 1
    assert d.value == 12
    assert d.deriv(D_Y) == 12
    assert d.deriv((0, 0, 2, 0)) == 6


def test_no_ybar_entries_without_conj_y():
    x = jet_seed((0.3 + 0.1j, -0.2 + 0.9j), "x")
    y = jet_seed((0.3 + 0.1j, -0.2 + 0.9j), "y")
    j = jet_combine("exp", x * y + jet_conj(x) * y**2) / (y + 3)
    assert all(k[3] == 0 for k in j.derivs)


# finite differences --------------------------------------------------------

def test_fd_linear_conjugate():
    est = fd_wirtinger(lambda x, y: x.conjugate(), (0.3 - 0.8j, 0j), D_XBAR, 1e-4)
    assert est.step == 1e-4
    assert abs(est.value - 1) < 1e-8


def test_fd_mixed_second_abs_square():
    est = fd_wirtinger(lambda x, y: x * x.conjugate(), (1 + 0j, 0j), (1, 1, 0, 0), 1e-3)
    assert abs(est.value - 1) < 1e-6


def test_fd_second_order_convergence_ratio():
    f = lambda x, y: cmath.exp(x + x.conjugate() ** 2)
    pt = (0.4 + 0.3j, 0j)
    exact = 2 * pt[0].conjugate() * cmath.exp(pt[0] + pt[0].conjugate() ** 2)
    e1 = abs(fd_wirtinger(f, pt, D_XBAR, 1e-2, richardson=False).value - exact)
    e2 = abs(fd_wirtinger(f, pt, D_XBAR, 5e-3, richardson=False).value - exact)
    assert 3.0 < e1 / e2 < 5.0


def test_fd_richardson_beats_raw():
    f = lambda x, y: cmath.exp(x + x.conjugate() ** 2)
    pt = (0.4 + 0.3j, 0j)
    exact = 2 * pt[0].conjugate() * cmath.exp(pt[0] + pt[0].conjugate() ** 2)
    raw = abs(fd_wirtinger(f, pt, D_XBAR, 1e-3, richardson=False).value - exact)
    extr = abs(fd_wirtinger(f, pt, D_XBAR, 1e-3).value - exact)
    assert extr < raw


def test_fd_matches_jets_on_smooth_function():
    # f(x, y) = exp(x) * y^2 + conj(x) / (y + 3)
    def f(x, y):
        return cmath.exp(x) * y**2 + x.conjugate() / (y + 3)

    pt = (0.2 - 0.4j, 0.5 + 0.1j)
    x = jet_seed(pt, "x")
    y = jet_seed(pt, "y")
    jet = jet_combine("exp", x) * y**2 + jet_conj(x) / (y + 3)
    # total order <= 2 at the default step; rounding noise scales like h^-k
    for index in [D_X, D_XBAR, D_Y, (1, 0, 1, 0), (0, 0, 2, 0)]:
        est = fd_wirtinger(f, pt, index, 1e-4)
        assert abs(est.value - jet.deriv(index)) < 1e-6, index
    est3 = fd_wirtinger(f, pt, (0, 1, 2, 0), 1e-2)
    assert abs(est3.value - jet.deriv((0, 1, 2, 0))) < 1e-5


def test_fd_order_three_with_coarse_step():
    def f(x, y):
        return cmath.exp(x) * y**3

    pt = (0.1 + 0.2j, 0.4 - 0.3j)
    x = jet_seed(pt, "x")
    y = jet_seed(pt, "y")
    jet = jet_combine("exp", x) * y**3
    est = fd_wirtinger(f, pt, (1, 0, 2, 0), 1e-2)
    assert abs(est.value - jet.deriv((1, 0, 2, 0))) < 1e-5


def test_fd_stencil_outside_domain():
    def f(x, y):
        if abs(x) < 1.5e-4:
            raise DivisionNearPole("pole", denominator=x)
        return 1 / x

    with pytest.raises(StencilOutsideDomain):
        fd_wirtinger(f, (1e-4 + 0j, 0j), D_X, 1e-4)


# algebraic properties ------------------------------------------------------

_complexes = st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e3)


@st.composite
def jets(draw, order=3):
    idxs = draw(st.lists(st.sampled_from(indices_up_to(order)[1:]), max_size=8, unique=True))
    derivs = {k: draw(_complexes) for k in idxs}
    return WirtingerJet(order, draw(_complexes), {k: v for k, v in derivs.items() if v != 0})


@settings(max_examples=200, deadline=None)
@given(jets())
def test_conj_is_involution(j):
    assert jet_conj(jet_conj(j)) == j


@settings(max_examples=200, deadline=None)
@given(jets(), jets())
def test_mul_exactly_commutative(a, b):
    assert jet_combine("mul", a, b) == jet_combine("mul", b, a)


@settings(max_examples=100, deadline=None)
@given(jets(), jets(), jets())
def test_add_associates_with_neg(a, b, c):
    lhs = (a + b) + c
    rhs = a + (b + c)
    for k in set(lhs._table()) | set(rhs._table()):
        assert lhs.deriv(k) == pytest.approx(rhs.deriv(k), abs=1e-6, rel=1e-9)


def test_order_mismatch_rejected():
    a = jet_seed((0j, 0j), "x", 3)
    b = jet_seed((0j, 0j), "x", 2)
    with pytest.raises(ValueError):
        jet_combine("add", a, b)


def test_exactness_on_rational_grid():
    # The product (x + y)^2 expanded by jets must agree exactly with the
    # directly assembled jet on dyadic inputs.
    pt = (0.5 + 0.25j, 0.125 + 0j)
    x = jet_seed(pt, "x")
    y = jet_seed(pt, "y")
    lhs = (x + y) ** 2
    rhs = x * x + 2 * x * y + y * y
    assert lhs.value == rhs.value
    for k in set(lhs._table()) | set(rhs._table()):
        assert lhs.deriv(k) == rhs.deriv(k)
