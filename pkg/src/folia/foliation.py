"""Built-in foliated-surface models and their fiber-to-leaf cylinder maps.

Three model families are supported.  The graph family has leaves that are
vertical lines over a base disk, carried by the rational map

    F(x, y) = (x, f(x) * y / (y + f(x)))

whose transverse weight f may depend antiholomorphically on the base
coordinate; that antiholomorphic dependence is exactly what the invariant
pipeline measures.  The product family is the trivial model F(x, y) = (x, y).
The explicit family accepts user components directly and validates that they
describe a legitimate cylinder: both components holomorphic in the fiber
variable, the image of the zero section a holomorphic disk, and the fiber
trivialization along that disk holomorphic as well.

Everything downstream works through :class:`CylinderMap`, which couples the
component formulas with enough provenance to invert in closed form where a
closed form exists.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivisionNearPole,
    NewtonDiverged,
    SingularJacobian,
    ValidationFailed,
)
from .exprlang import (
    Expr,
    Var,
    add,
    assert_y_holomorphic,
    const_expr,
    div,
    eval_jet,
    expr_uses,
    mul,
    parse,
    powi,
    sub,
)
from .wirtinger import (
    D_X,
    D_XBAR,
    D_Y,
    D_YBAR,
    DEFAULT_ORDER,
    Point,
    WirtingerJet,
)

VALIDATION_POINTS = 21
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

_DISK_TOL = 1e-10
_TRIVIALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class Domain:
    """Sampling domain: base disk radius, fiber bound, and pole clearance."""

    base_radius: float = 0.9
    fiber_bound: float = 3.0
    sing_clearance: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.base_radius <= 1.0:
            raise ValidationFailed(
                f"base radius {self.base_radius} outside (0, 1]",
                invariant="base-radius-range")
        if self.fiber_bound <= 0.0:
            raise ValidationFailed(
                f"fiber bound {self.fiber_bound} must be positive",
                invariant="fiber-bound-positive")
        if self.sing_clearance <= 0.0:
            raise ValidationFailed(
                f"singular clearance {self.sing_clearance} must be positive",
                invariant="clearance-positive")


@dataclass(frozen=True)
class GraphModel:
    f: Expr
    domain: Domain = Domain()


@dataclass(frozen=True)
class ProductModel:
    domain: Domain = Domain()


@dataclass(frozen=True)
class ExplicitCylinderModel:
    f1: Expr
    f2: Expr
    domain: Domain = Domain()


FoliationModel = GraphModel | ProductModel | ExplicitCylinderModel


@dataclass(frozen=True)
class Provenance:
    """How a cylinder map was produced, with the data needed to invert it.

    kind is one of graph, product, explicit, second-cylinder.  The graph
    kinds carry the transverse weight f; a second cylinder additionally
    carries the fiber-affine reparametrization y -> slope*y + shift that
    relates it to the original graph map.
    """

    kind: str
    f: Expr | None = None
    offset: complex | None = None
    slope_fn: Expr | None = None
    shift_fn: Expr | None = None


@dataclass(frozen=True)
class CylinderMap:
    """A concrete map from (base disk) x (fiber plane) into the surface."""

    f1: Expr
    f2: Expr
    provenance: Provenance
    domain: Domain = Domain()

    def value(self, at: Point) -> tuple[complex, complex]:
        """Plain point evaluation of both components."""
        return (eval_jet(self.f1, at, order=1).value,
                eval_jet(self.f2, at, order=1).value)


# lattices and grids --------------------------------------------------------

def square_lattice(radius: float, n: int = VALIDATION_POINTS) -> list[complex]:
    """n-by-n uniform points over the square [-radius, radius]^2, row-major."""
    if n < 2:
        raise ValueError("lattice needs at least 2 points per side")
    coords = [-radius + 2.0 * radius * k / (n - 1) for k in range(n)]
    return [complex(u, v) for u in coords for v in coords]


def base_lattice(domain: Domain, n: int = VALIDATION_POINTS) -> list[complex]:
    """Validation lattice over the base disk: the square clipped to the disk."""
    r = domain.base_radius
    return [p for p in square_lattice(r, n) if abs(p) <= r * (1.0 + 1e-12)]


def vogel_points(n: int, radius: float) -> list[complex]:
    """n golden-angle spiral points filling the disk quasi-uniformly."""
    if n < 1:
        raise ValueError("need at least one point")
    return [radius * math.sqrt((j + 0.5) / n) * cmath.exp(1j * GOLDEN_ANGLE * j)
            for j in range(n)]


def eval_grid(domain: Domain, n_base: int, m_fiber: int) -> list[Point]:
    """Evaluation grid: spiral base points crossed with spiral fiber points.

    Row-major: the base point varies slowest.  The fiber disk is the one
    inscribed in the fiber box.
    """
    xs = vogel_points(n_base, domain.base_radius)
    ys = vogel_points(m_fiber, domain.fiber_bound)
    return [(x, y) for x in xs for y in ys]


# model factories -----------------------------------------------------------

def _as_expr(e: Expr | str) -> Expr:
    return parse(e) if isinstance(e, str) else e


def _validate_graph_weight(f: Expr, domain: Domain) -> None:
    if expr_uses(f, "y"):
        raise ValidationFailed(
            "graph transverse weight must depend on x only",
            invariant="weight-independent-of-fiber")
    lo = domain.sing_clearance
    hi = 1.0 / domain.sing_clearance
    for p in base_lattice(domain):
        v = eval_jet(f, (p, 0j), order=1).value
        if not lo <= abs(v) <= hi:
            raise ValidationFailed(
                f"|f({p!r})| = {abs(v):.6e} outside [{lo:g}, {hi:g}]",
                invariant="weight-bounded-on-base", point=(p, 0j))


def _validate_explicit_components(f1: Expr, f2: Expr, domain: Domain) -> None:
    for name, comp in (("first", f1), ("second", f2)):
        bad = assert_y_holomorphic(comp)
        if bad is not None:
            raise ValidationFailed(
                f"{name} component conjugates the fiber variable "
                f"(offsets {bad.start}..{bad.end})",
                invariant="fiber-holomorphic-components")
    for p in base_lattice(domain):
        for name, comp in (("first", f1), ("second", f2)):
            jet = eval_jet(comp, (p, 0j), order=2)
            disk = abs(jet.deriv(D_XBAR))
            if disk >= _DISK_TOL:
                raise ValidationFailed(
                    f"{name} component has zero-section dbar residual "
                    f"{disk:.3e} at x = {p!r}",
                    invariant="holomorphic-zero-section", point=(p, 0j))
            triv = abs(jet.deriv((0, 1, 1, 0)))
            if triv > _TRIVIALIZATION_TOL:
                raise ValidationFailed(
                    f"{name} component has trivialization residual "
                    f"{triv:.3e} at x = {p!r}",
                    invariant="holomorphic-trivialization", point=(p, 0j))


def graph_model(f: Expr | str, domain: Domain | None = None) -> GraphModel:
    """Validated graph-family model with transverse weight f(x)."""
    dom = domain if domain is not None else Domain()
    fe = _as_expr(f)
    _validate_graph_weight(fe, dom)
    return GraphModel(fe, dom)


def product_model(domain: Domain | None = None) -> ProductModel:
    """The trivial product model."""
    return ProductModel(domain if domain is not None else Domain())


def explicit_cylinder_model(f1: Expr | str, f2: Expr | str,
                            domain: Domain | None = None) -> ExplicitCylinderModel:
    """Validated explicit model with user-supplied components."""
    dom = domain if domain is not None else Domain()
    e1, e2 = _as_expr(f1), _as_expr(f2)
    _validate_explicit_components(e1, e2, dom)
    return ExplicitCylinderModel(e1, e2, dom)


# cylinder maps -------------------------------------------------------------

_X = Var("x")
_Y = Var("y")


def cylinder_map(m: FoliationModel) -> CylinderMap:
    """The model's cylinder map in closed form, revalidating the model."""
    if isinstance(m, GraphModel):
        _validate_graph_weight(m.f, m.domain)
        f2 = div(mul(m.f, _Y), add(_Y, m.f))
        return CylinderMap(_X, f2, Provenance("graph", f=m.f), m.domain)
    if isinstance(m, ProductModel):
        return CylinderMap(_X, _Y, Provenance("product"), m.domain)
    if isinstance(m, ExplicitCylinderModel):
        _validate_explicit_components(m.f1, m.f2, m.domain)
        return CylinderMap(m.f1, m.f2, Provenance("explicit"), m.domain)
    raise TypeError(f"not a foliation model: {m!r}")


def excluded_reason(F: CylinderMap, at: Point) -> str | None:
    """Why a point cannot be sampled, or None if it can.

    Points outside the base disk or fiber box are excluded, as are points
    inside the singular clearance of a graph-family pole and points where an
    explicit map stops being an immersion along the fiber.
    """
    x, y = at
    dom = F.domain
    if abs(x) > dom.base_radius * (1.0 + 1e-12):
        return "outside-base-disk"
    if max(abs(y.real), abs(y.imag)) > dom.fiber_bound * (1.0 + 1e-12):
        return "outside-fiber-box"
    prov = F.provenance
    if prov.kind in ("graph", "second-cylinder"):
        f_val = eval_jet(prov.f, (x, 0j), order=1).value
        w = y
        if prov.kind == "second-cylinder":
            a = eval_jet(prov.slope_fn, (x, 0j), order=1).value
            b = eval_jet(prov.shift_fn, (x, 0j), order=1).value
            w = a * y + b
        if abs(w + f_val) < dom.sing_clearance:
            return "singular-clearance"
    elif prov.kind == "explicit":
        j1 = eval_jet(F.f1, at, order=1)
        j2 = eval_jet(F.f2, at, order=1)
        if max(abs(j1.deriv(D_Y)), abs(j2.deriv(D_Y))) < dom.sing_clearance:
            return "immersion-degenerate"
    return None


@dataclass(frozen=True)
class DiffData:
    """Jets of both components at a point, with the differential's columns."""

    at: Point
    j1: WirtingerJet
    j2: WirtingerJet

    @property
    def value(self) -> tuple[complex, complex]:
        return (self.j1.value, self.j2.value)

    @property
    def d_x(self) -> tuple[complex, complex]:
        return (self.j1.deriv(D_X), self.j2.deriv(D_X))

    @property
    def d_xbar(self) -> tuple[complex, complex]:
        return (self.j1.deriv(D_XBAR), self.j2.deriv(D_XBAR))

    @property
    def d_y(self) -> tuple[complex, complex]:
        return (self.j1.deriv(D_Y), self.j2.deriv(D_Y))

    @property
    def d_ybar(self) -> tuple[complex, complex]:
        return (self.j1.deriv(D_YBAR), self.j2.deriv(D_YBAR))

    def tangency_residual(self) -> float:
        """Modulus of det [dF/dxbar, dF/dy].

        Zero exactly when the antiholomorphic base drift lies along the
        fiber direction, the solvability condition for the defect function.
        """
        a, b = self.d_xbar
        c, d = self.d_y
        return abs(a * d - b * c)


def differential(F: CylinderMap, at: Point,
                 order: int = DEFAULT_ORDER) -> DiffData:
    """Full jets of both components at a point.

    The fiber-antiholomorphic column must vanish identically; a nonzero
    entry means the map was built outside the validated factories.
    """
    j1 = eval_jet(F.f1, at, order)
    j2 = eval_jet(F.f2, at, order)
    data = DiffData(at, j1, j2)
    if data.d_ybar != (0j, 0j):
        raise ValidationFailed(
            "components depend antiholomorphically on the fiber variable",
            invariant="fiber-holomorphic-components", point=at)
    return data


# local inversion -----------------------------------------------------------

_NEWTON_CAP = 50
_NEWTON_STEP_TOL = 1e-13
_INVERSE_RESIDUAL_TOL = 1e-12


def _graph_fiber_from_image(f_val: complex, z2: complex, at) -> complex:
    """Solve w*f/(w+f) = z2 for w; the image z2 = f is the deleted point."""
    denom = f_val - z2
    if abs(denom) <= 1e-12 * (1.0 + abs(f_val) + abs(z2)):
        raise SingularJacobian(
            f"image fiber value {z2!r} sits at the deleted graph point",
            point=at)
    return z2 * f_val / denom


def invert_local(F: CylinderMap, z: tuple[complex, complex],
                 seed: Point | None = None) -> Point:
    """Cylinder coordinates of an ambient point near the sampled patch.

    Graph-family maps invert in closed form; explicit maps run a damped-free
    Newton iteration on the real-linear differential starting from the seed
    (default: z itself).  The result satisfies |F(result) - z| <= 1e-12 in
    max norm.
    """
    prov = F.provenance
    if prov.kind == "product":
        return (z[0], z[1])
    if prov.kind in ("graph", "second-cylinder"):
        x = z[0]
        f_val = eval_jet(prov.f, (x, 0j), order=1).value
        w = _graph_fiber_from_image(f_val, z[1], z)
        if prov.kind == "graph":
            return (x, w)
        a = eval_jet(prov.slope_fn, (x, 0j), order=1).value
        b = eval_jet(prov.shift_fn, (x, 0j), order=1).value
        if abs(a) <= 1e-12:
            raise SingularJacobian("fiber-affine slope vanishes", point=z)
        return (x, (w - b) / a)
    return _invert_newton(F, z, seed)


def _invert_newton(F: CylinderMap, z: tuple[complex, complex],
                   seed: Point | None) -> Point:
    p = (z[0], z[1]) if seed is None else (seed[0], seed[1])
    for _ in range(_NEWTON_CAP):
        d = differential(F, p, order=1)
        g1 = d.j1.value - z[0]
        g2 = d.j2.value - z[1]
        a1, a2 = d.d_x
        b1, b2 = d.d_xbar
        c1, c2 = d.d_y
        # Real-linear system in (dx, dy, conj dx, conj dy); closing it under
        # conjugation keeps the solve complex-linear.
        mat = np.array([
            [a1, c1, b1, 0],
            [a2, c2, b2, 0],
            [np.conj(b1), 0, np.conj(a1), np.conj(c1)],
            [np.conj(b2), 0, np.conj(a2), np.conj(c2)],
        ], dtype=complex)
        rhs = np.array([-g1, -g2, -np.conj(g1), -np.conj(g2)], dtype=complex)
        try:
            step = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(
                f"differential numerically singular at {p!r}",
                point=p) from exc
        p = (p[0] + complex(step[0]), p[1] + complex(step[1]))
        if max(abs(complex(step[0])), abs(complex(step[1]))) < _NEWTON_STEP_TOL:
            break
    v1, v2 = F.value(p)
    residual = max(abs(v1 - z[0]), abs(v2 - z[1]))
    if residual > _INVERSE_RESIDUAL_TOL:
        raise NewtonDiverged(
            f"inversion residual {residual:.3e} above {_INVERSE_RESIDUAL_TOL:g}",
            point=p, residual=residual, iterations=_NEWTON_CAP)
    return p


# derived cylinders ---------------------------------------------------------

def second_cylinder(m: FoliationModel, c: complex) -> CylinderMap:
    """A second cylinder map along the horizontal disk at height c.

    Composes the graph map with the fiber-affine change y -> a(x)*y + b(x)
    chosen so the new map sends the zero section onto {(x, c)} with unit
    fiber derivative there:

        b = c*f/(f - c)        a = (b + f)^2 / f^2

    Both coefficient formulas are returned as expression trees, so every
    downstream quantity stays inside jet arithmetic.
    """
    if not isinstance(m, GraphModel):
        raise ValidationFailed(
            "second cylinders are defined for graph-family models",
            invariant="graph-model-required")
    c = complex(c)
    if abs(c) <= 1e-12:
        raise ValidationFailed(
            "disk height c must be nonzero (c = 0 reproduces the original map)",
            invariant="nonzero-disk-height")
    f = m.f
    for p in base_lattice(m.domain):
        f_val = eval_jet(f, (p, 0j), order=1).value
        if abs(f_val - c) <= 1e-8 * (1.0 + abs(f_val)):
            raise ValidationFailed(
                f"f - c vanishes at x = {p!r}",
                invariant="disk-misses-deleted-point", point=(p, 0j))
    c_expr = const_expr(c)
    b_expr = div(mul(c_expr, f), sub(f, c_expr))
    a_expr = div(powi(add(b_expr, f), 2), powi(f, 2))
    theta2 = add(mul(a_expr, _Y), b_expr)
    f2 = div(mul(f, theta2), add(theta2, f))
    prov = Provenance("second-cylinder", f=f, offset=c,
                      slope_fn=a_expr, shift_fn=b_expr)
    return CylinderMap(_X, f2, prov, m.domain)


# projection along leaves ---------------------------------------------------

def project_along_leaves(m: FoliationModel, target_disk: Expr | str,
                         z: tuple[complex, complex]) -> tuple[complex, complex]:
    """Slide an ambient point along its leaf onto the graph of d(x).

    The built-in models all have leaves contained in vertical lines, so the
    projection keeps the base coordinate and replaces the fiber coordinate
    with d evaluated there.  The target disk must be a holomorphic graph;
    that hypothesis is what makes the projection holomorphic, and it is
    validated, not assumed.
    """
    d = _as_expr(target_disk)
    if expr_uses(d, "y"):
        raise ValidationFailed(
            "target disk must be a graph over the base, independent of y",
            invariant="target-disk-graph")
    for p in base_lattice(_domain_of(m)):
        jet = eval_jet(d, (p, 0j), order=1)
        if abs(jet.deriv(D_XBAR)) >= _DISK_TOL:
            raise ValidationFailed(
                f"target disk is not holomorphic at x = {p!r}",
                invariant="target-disk-holomorphic", point=(p, 0j))
    if isinstance(m, ExplicitCylinderModel) and expr_uses(m.f1, "y"):
        raise ValidationFailed(
            "projection needs leaves inside vertical lines "
            "(first component independent of y)",
            invariant="vertical-leaves-required")
    x = z[0]
    return (x, eval_jet(d, (x, 0j), order=1).value)


def _domain_of(m: FoliationModel) -> Domain:
    return m.domain
