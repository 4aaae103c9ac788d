"""Leaf Laplacians, curvature margins, log-harmonicity of sections."""

import cmath

import pytest

from folia.curvature import (
    LeafField,
    holomorphic_log_harmonicity,
    leaf_laplacian,
    negative_curvature_margin,
)
from folia.errors import NotLeafwiseHolomorphic, StencilHitsZeroSet
from folia.invariants import gamma_cyl


def _real_field(fn, zeros=(), clearance=1e-3):
    return LeafField(fn, tuple(zeros), clearance)


def test_log_modulus_squared_is_harmonic_off_origin():
    field = _real_field(lambda y: 2.0 * cmath.log(abs(y)).real,
                        zeros=(0j,), clearance=0.1)
    assert abs(leaf_laplacian(field, 1 + 0j)) < 1e-6


def test_modulus_squared_has_constant_laplacian():
    field = _real_field(lambda y: (y * y.conjugate()).real)
    for y in (1 + 0j, -0.3 + 0.8j, 2j):
        assert leaf_laplacian(field, y) == pytest.approx(4.0, abs=1e-6)


def test_laplacian_converges_at_second_order():
    field = _real_field(lambda y: y.real ** 4)
    y = 1 + 0.5j
    exact = 12.0 * y.real ** 2
    err_h = leaf_laplacian(field, y, 1e-2, richardson=False) - exact
    err_half = leaf_laplacian(field, y, 5e-3, richardson=False) - exact
    assert err_h / err_half == pytest.approx(4.0, rel=0.25)


def test_richardson_level_removes_quartic_error():
    field = _real_field(lambda y: y.real ** 4)
    y = 1 + 0.5j
    assert leaf_laplacian(field, y) == pytest.approx(12.0, abs=1e-9)


def test_stencil_respects_zero_clearance():
    field = _real_field(lambda y: abs(y), zeros=(0j,), clearance=0.05)
    with pytest.raises(StencilHitsZeroSet):
        leaf_laplacian(field, 0.055 + 0j, 1e-2)
    assert leaf_laplacian(field, 1 + 0j, 1e-2) == pytest.approx(1.0, abs=1e-4)


def test_field_from_expression_fixes_base_point():
    field = LeafField.from_expr("y*conj(y)+x", x=1 + 0j)
    assert field.func(2 + 0j) == 5 + 0j


def test_negative_curvature_margin_for_gaussian_weight():
    samples = [0j, 0.5 + 0.5j, -1 + 0.2j]
    holds, margin = negative_curvature_margin(
        "-(y*conj(y))", "1", 0.5, samples)
    assert holds
    assert margin == pytest.approx(0.5, abs=1e-9)


def test_flat_weight_fails_margin():
    holds, margin = negative_curvature_margin("0", "1", 0.25, [0j, 1 + 0j])
    assert not holds
    assert margin == pytest.approx(-0.25, abs=1e-9)


def test_positive_curvature_fails_margin():
    holds, _ = negative_curvature_margin(
        "y*conj(y)", "1", 0.1, [0.3 + 0j, 1j])
    assert not holds


def test_margin_shrinks_as_bound_tightens():
    samples = [0j, 0.4 - 0.6j]
    _, loose = negative_curvature_margin("-(y*conj(y))", "1", 0.1, samples)
    _, tight = negative_curvature_margin("-(y*conj(y))", "1", 0.5, samples)
    assert loose > tight
    assert loose == pytest.approx(0.9, abs=1e-9)


def test_log_harmonicity_of_square_field():
    field = LeafField(lambda y: y * y, zeros=(0j,), clearance=0.1)
    samples = [0.5 + 0j, 1 + 1j, 2j, -1.5 + 0.3j]
    assert holomorphic_log_harmonicity(field, samples) < 1e-5


def test_log_harmonicity_of_exponential_field():
    field = LeafField(lambda y: cmath.exp(0.3 * y))
    assert holomorphic_log_harmonicity(field, [0j, 1 + 0.5j]) < 1e-6


def test_log_harmonicity_rejects_antiholomorphic_field():
    field = LeafField(lambda y: y.conjugate(), zeros=(0j,), clearance=0.1)
    with pytest.raises(NotLeafwiseHolomorphic):
        holomorphic_log_harmonicity(field, [1 + 0j])


def test_obstruction_coefficient_log_is_harmonic_along_leaf(graph_map):
    field = LeafField(lambda y: gamma_cyl(graph_map, (0j, y)))
    assert holomorphic_log_harmonicity(field, [0.5 + 0j, 1j, -0.7 + 0.2j]) \
        < 1e-6
