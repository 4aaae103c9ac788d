"""Shared model fixtures."""

import pytest

from folia.foliation import (
    Domain,
    cylinder_map,
    explicit_cylinder_model,
    graph_model,
    product_model,
)


@pytest.fixture(scope="session")
def graph_map():
    """Graph-family map with an antiholomorphic transverse weight."""
    return cylinder_map(graph_model("conj(x)+2"))


@pytest.fixture(scope="session")
def holomorphic_graph_map():
    """Graph-family map whose weight is holomorphic, so the defect vanishes."""
    return cylinder_map(graph_model("x/2+2"))


@pytest.fixture(scope="session")
def product_map():
    return cylinder_map(product_model())


@pytest.fixture(scope="session")
def cubic_map():
    """Explicit map with a cubic antiholomorphic correction off the zero section."""
    return cylinder_map(explicit_cylinder_model(
        "x", "y+conj(x)*y^3", Domain(fiber_bound=0.5)))
